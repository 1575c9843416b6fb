#include "dris/simnet.hpp"

#include <algorithm>

#include "dris/canonical_json.hpp"
#include "dris/errors.hpp"

namespace dris {

void validate_config(const SimConfig& config) {
    if (config.latency_min_ms > config.latency_max_ms)
        throw_error(ErrorCode::InvalidArgument, "latency_min_ms exceeds latency_max_ms");
    if (config.harvest_period_s == 0 || config.push_period_s == 0)
        throw_error(ErrorCode::InvalidArgument, "periods must be positive");
    if (config.drop_probability < 0.0 || config.drop_probability > 1.0)
        throw_error(ErrorCode::InvalidArgument, "drop_probability outside [0,1]");
    if (config.rpc_timeout_s == 0 || config.query_timeout_s == 0)
        throw_error(ErrorCode::InvalidArgument, "timeouts must be positive");
}

void EventTrace::record(SimTime t, std::string_view kind, std::string_view detail) {
    TraceEvent e{t, std::string(kind), std::string(detail)};
    std::string line = canonical_line(e);
    hash_ = fnv1a64(line, hash_);
    events_.push_back(std::move(e));
}

std::string EventTrace::canonical_line(const TraceEvent& e) {
    JsonWriter w;
    w.begin_object();
    w.key("detail").value(e.detail);
    w.key("kind").value(e.kind);
    w.key("t").value(e.t);
    w.end_object();
    std::string line = w.take();
    line.push_back('\n');
    return line;
}

Simulation::Simulation(SimConfig config) : config_(config), rng_(config.seed) {
    validate_config(config_);
    end_time_us_ = config_.end_time_s * kMicrosPerSecond;
}

void Simulation::register_node(const DomainName& domain, Level role) {
    if (level_of(domain) != role)
        throw_error(ErrorCode::RoleMismatch, domain.str() + " cannot act as " + std::string(level_name(role)));
    if (registered_.count(domain)) throw_error(ErrorCode::DuplicateDomain, domain.str() + " already registered");
    if (role == Level::Subnet && !registered_.count(domain.parent()))
        throw_error(ErrorCode::OrphanDomain, domain.str() + " registered before its parent " + domain.parent().str());

    switch (role) {
        case Level::Root:
            roots_.emplace(domain, RootBroker(domain));
            root_order_.push_back(domain);
            break;
        case Level::Subnet:
            hubs_.emplace(domain, HarvestNode(domain));
            hub_order_.push_back(domain);
            break;
        case Level::Org: {
            // An org's operational parent is its sub-network, which for deep
            // names is not domain.parent(); look it up before mutating.
            HarvestNode& hub = hubs_.at(hub_of(domain));
            orgs_.emplace(domain, OrgNode(domain));
            hub.register_child(domain);
            break;
        }
    }
    registered_.emplace(domain, role);
}

void Simulation::register_node(const DomainName& domain) { register_node(domain, level_of(domain)); }

void Simulation::set_query_defaults(std::uint32_t width, MergeMode mode) {
    query_width_ = width;
    query_mode_ = mode;
}

OrgNode& Simulation::org(const DomainName& d) { return orgs_.at(d); }
HarvestNode& Simulation::hub(const DomainName& d) { return hubs_.at(d); }
RootBroker& Simulation::root(const DomainName& d) { return roots_.at(d); }

DomainName Simulation::hub_of(const DomainName& org) const {
    DomainName d = org;
    while (d.depth() > 2) d = d.parent();
    if (!hubs_.count(d)) throw_error(ErrorCode::OrphanDomain, org.str() + " has no registered sub-network");
    return d;
}

std::vector<MetadataRecord> Simulation::current_metadata() const {
    std::vector<MetadataRecord> all;
    for (const auto& [domain, org] : orgs_) {
        auto records = org.metadata_snapshot();
        all.insert(all.end(), std::make_move_iterator(records.begin()), std::make_move_iterator(records.end()));
    }
    return all;
}

double Simulation::coverage() const {
    if (metrics_.docs.empty()) return 1.0;
    std::size_t covered = 0;
    for (const auto& [doc_id, times] : metrics_.docs)
        if (times.covered) ++covered;
    return static_cast<double>(covered) / static_cast<double>(metrics_.docs.size());
}

void Simulation::push_event(Event e) {
    e.seq = next_event_seq_++;
    queue_.push(std::move(e));
}

namespace {

std::string describe(const wire::Envelope& env, const std::string& bytes) {
    std::string d(wire::msg_type_name(env.msg_type));
    d += " " + env.sender.str() + ">" + env.recipient.str();
    d += " rid=" + std::to_string(env.request_id);
    d += " bytes=" + std::to_string(bytes.size());
    d += " digest=" + hex16(fnv1a64(bytes));
    return d;
}

std::string join_terms(const std::vector<std::string>& terms) {
    std::string out;
    for (const auto& t : terms) {
        if (!out.empty()) out += ' ';
        out += t;
    }
    return out;
}

}  // namespace

void Simulation::send(wire::Envelope env, SimTime now) {
    if (!registered_.count(env.recipient))
        throw_error(ErrorCode::UnknownRecipient, env.recipient.str() + " is not part of the topology");

    std::string bytes;
    try {
        bytes = wire::encode(env);
    } catch (const DrisError& e) {
        node_error(env.sender, e.what(), now);
        return;
    }

    SendRecord rec{now, env.msg_type, bytes.size(), false};
    metrics_.bytes_by_type[std::string(wire::msg_type_name(env.msg_type))] += bytes.size();
    std::string detail = describe(env, bytes);

    if (rng_.next_bernoulli(config_.drop_probability)) {
        rec.dropped = true;
        metrics_.sends.push_back(rec);
        trace_.record(now, "drop", detail);
        return;
    }
    metrics_.sends.push_back(rec);
    SimTime latency = rng_.next_in(std::uint64_t{config_.latency_min_ms} * kMicrosPerMilli,
                                   std::uint64_t{config_.latency_max_ms} * kMicrosPerMilli);
    trace_.record(now, "send", detail);

    Event ev;
    ev.t = now + latency;
    ev.kind = EvKind::Deliver;
    ev.env = std::move(env);
    push_event(std::move(ev));
}

void Simulation::node_error(const DomainName& where, const std::string& what, SimTime now) {
    ++metrics_.node_errors;
    trace_.record(now, "node_error", where.str() + ": " + what);
}

void Simulation::run(const std::vector<Stimulus>& scenario) {
    for (const auto& s : scenario) {
        if (s.t >= end_time_us_)
            throw_error(ErrorCode::InvalidArgument,
                        "stimulus at " + std::to_string(s.t) + "us is not before end_time");
    }

    // Scenario first, then harvest timers, then push timers: stimuli win
    // ties, and the tick order is fixed by topology construction order.
    for (std::size_t i = 0; i < scenario.size(); ++i) {
        Event ev;
        ev.t = scenario[i].t;
        ev.kind = EvKind::Stimulus;
        ev.stimulus = i;
        push_event(std::move(ev));
    }
    SimTime harvest_period = config_.harvest_period_s * kMicrosPerSecond;
    SimTime push_period = config_.push_period_s * kMicrosPerSecond;
    for (const auto& hub : hub_order_) {
        if (harvest_period <= end_time_us_) {
            Event ev;
            ev.t = harvest_period;
            ev.kind = EvKind::HarvestTick;
            ev.node = hub;
            push_event(std::move(ev));
        }
    }
    for (const auto& hub : hub_order_) {
        if (push_period <= end_time_us_) {
            Event ev;
            ev.t = push_period;
            ev.kind = EvKind::PushTick;
            ev.node = hub;
            push_event(std::move(ev));
        }
    }

    while (!queue_.empty()) {
        Event ev = queue_.top();
        queue_.pop();
        if (ev.t > end_time_us_) break;
        switch (ev.kind) {
            case EvKind::Stimulus:
                on_stimulus(scenario[ev.stimulus], ev.t);
                break;
            case EvKind::Deliver:
                on_deliver(ev.env, ev.t);
                break;
            case EvKind::HarvestTick:
                on_harvest_tick(ev.node, ev.t);
                break;
            case EvKind::PushTick:
                on_push_tick(ev.node, ev.t);
                break;
            case EvKind::RpcTimeout:
                on_rpc_timeout(ev.request_id, ev.t);
                break;
            case EvKind::QueryTimeout:
                on_query_timeout(ev.request_id, ev.t);
                break;
        }
    }
}

void Simulation::on_stimulus(const Stimulus& s, SimTime now) {
    switch (s.op) {
        case Stimulus::Op::Upsert: {
            trace_.record(now, "stimulus", "upsert " + s.doc.doc_id + "@" + s.doc.owner.str());
            auto it = orgs_.find(s.doc.owner);
            if (it == orgs_.end()) {
                node_error(s.doc.owner, "upsert for unknown org", now);
                return;
            }
            try {
                it->second.upsert(s.doc, now);
            } catch (const DrisError& e) {
                node_error(s.doc.owner, e.what(), now);
                return;
            }
            auto [entry, fresh] = metrics_.docs.try_emplace(s.doc.doc_id);
            if (fresh) entry->second.upserted = now;
            break;
        }
        case Stimulus::Op::Delete: {
            trace_.record(now, "stimulus", "delete " + s.doc_id + "@" + s.owner.str());
            auto it = orgs_.find(s.owner);
            if (it == orgs_.end()) {
                node_error(s.owner, "delete for unknown org", now);
                return;
            }
            try {
                it->second.remove(s.doc_id, now);
            } catch (const DrisError& e) {
                node_error(s.owner, e.what(), now);
                return;
            }
            metrics_.docs.erase(s.doc_id);
            break;
        }
        case Stimulus::Op::Query: {
            trace_.record(now, "stimulus",
                          "query [" + join_terms(s.query.terms) + "] k=" + std::to_string(s.query.k));
            start_query(s.query, now);
            break;
        }
    }
}

void Simulation::start_query(const Query& q, SimTime now) {
    std::uint64_t query_id = ++last_query_id_;
    QueryRecord failed;
    failed.issued = now;
    failed.finished = now;

    if (root_order_.empty()) {
        node_error(DomainName::parse("unrouted"), "query with no root registered", now);
        metrics_.queries.push_back(failed);
        return;
    }
    const DomainName& root_domain = root_order_.front();
    RootBroker& broker = roots_.at(root_domain);

    PendingQuery pq;
    pq.issued = now;
    pq.query = q;
    pq.root = root_domain;
    try {
        validate_query(q);
        pq.state = broker.begin_search(q, query_width_, query_mode_);
    } catch (const DrisError& e) {
        node_error(root_domain, e.what(), now);
        metrics_.queries.push_back(failed);
        return;
    }
    pq.oracle_hits = GlobalOracle::metadata(current_metadata()).search(q);

    std::vector<DomainName> targets = pq.state.plan.targets;
    std::uint32_t fanout_k = pq.state.fanout_k;
    pending_queries_.emplace(query_id, std::move(pq));

    for (const auto& target : targets) {
        std::uint64_t rid = next_request_id();
        query_rpcs_[rid] = query_id;
        query_rpc_targets_[rid] = target;

        wire::Envelope env;
        env.msg_type = wire::MsgType::SearchRequest;
        env.sender = root_domain;
        env.recipient = target;
        env.request_id = rid;
        env.payload = wire::SearchRequestPayload{q.terms, fanout_k};
        send(std::move(env), now);

        Event timeout;
        timeout.t = now + config_.query_timeout_s * kMicrosPerSecond;
        timeout.kind = EvKind::QueryTimeout;
        timeout.request_id = rid;
        push_event(std::move(timeout));
    }
}

void Simulation::on_deliver(const wire::Envelope& env, SimTime now) {
    trace_.record(now, "deliver", describe(env, wire::encode(env)));
    auto role = registered_.find(env.recipient);
    if (role == registered_.end()) {
        node_error(env.recipient, "delivery to unregistered node", now);
        return;
    }
    switch (role->second) {
        case Level::Org:
            org_handle(orgs_.at(env.recipient), env, now);
            break;
        case Level::Subnet:
            hub_handle(hubs_.at(env.recipient), env, now);
            break;
        case Level::Root:
            root_handle(roots_.at(env.recipient), env, now);
            break;
    }
}

void Simulation::org_handle(OrgNode& org, const wire::Envelope& env, SimTime now) {
    if (env.msg_type != wire::MsgType::HarvestRequest) {
        node_error(org.owner(), "unexpected " + std::string(wire::msg_type_name(env.msg_type)), now);
        return;
    }
    const auto& p = std::get<wire::HarvestRequestPayload>(env.payload);
    wire::Envelope reply;
    reply.sender = org.owner();
    reply.recipient = env.sender;
    reply.request_id = env.request_id;
    try {
        HarvestBatch batch = org.list_records(p.from_seq, p.token);
        reply.msg_type = wire::MsgType::HarvestResponse;
        reply.payload = wire::HarvestResponsePayload{std::move(batch.records),
                                                     batch.next_token.value_or(""), batch.high_seq};
    } catch (const DrisError& e) {
        node_error(org.owner(), e.what(), now);
        reply.msg_type = wire::MsgType::Error;
        reply.payload = wire::ErrorPayload{std::string(error_code_name(e.code())), e.what()};
    }
    send(std::move(reply), now);
}

void Simulation::hub_handle(HarvestNode& hub, const wire::Envelope& env, SimTime now) {
    switch (env.msg_type) {
        case wire::MsgType::SearchRequest: {
            const auto& p = std::get<wire::SearchRequestPayload>(env.payload);
            Query q;
            q.terms = p.terms;
            wire::Envelope reply;
            reply.sender = hub.domain();
            reply.recipient = env.sender;
            reply.request_id = env.request_id;
            try {
                reply.msg_type = wire::MsgType::SearchResponse;
                reply.payload = wire::SearchResponsePayload{hub.search(q, p.k), false};
            } catch (const DrisError& e) {
                node_error(hub.domain(), e.what(), now);
                reply.msg_type = wire::MsgType::Error;
                reply.payload = wire::ErrorPayload{std::string(error_code_name(e.code())), e.what()};
            }
            send(std::move(reply), now);
            return;
        }
        case wire::MsgType::HarvestResponse: {
            auto it = pending_harvests_.find(env.request_id);
            if (it == pending_harvests_.end()) return;  // answered too late, session abandoned
            PendingHarvest ph = std::move(it->second);
            pending_harvests_.erase(it);

            const auto& p = std::get<wire::HarvestResponsePayload>(env.payload);
            HarvestBatch batch;
            batch.records = p.records;
            if (!p.next_token.empty()) batch.next_token = p.next_token;
            batch.high_seq = p.high_seq;

            auto result = hub.on_batch(ph.session, batch, now);
            trace_.record(now, "apply",
                          hub.domain().str() + " child=" + ph.session.child.str() + " applied=" +
                              std::to_string(result.applied.size()) + " high=" + std::to_string(batch.high_seq));
            auto& applied_at = hub_applies_[hub.domain()];
            for (const auto& [doc_id, live] : result.applied) {
                if (live) {
                    applied_at.try_emplace(doc_id, now);
                    auto doc = metrics_.docs.find(doc_id);
                    if (doc != metrics_.docs.end() && !doc->second.applied) doc->second.applied = now;
                } else {
                    applied_at.erase(doc_id);
                }
            }

            if (result.next) {
                send_harvest_poll(hub, std::move(ph.session), *result.next, now);
            } else if (ph.session.applied > 0) {
                // Something changed: refresh the root right away instead of
                // waiting out the push period.
                push_description(hub, now);
            }
            return;
        }
        case wire::MsgType::Error: {
            auto it = pending_harvests_.find(env.request_id);
            if (it == pending_harvests_.end()) return;  // e.g. a stale-description reply; nothing to unwind
            PendingHarvest ph = std::move(it->second);
            pending_harvests_.erase(it);

            const auto& p = std::get<wire::ErrorPayload>(env.payload);
            ErrorCode code = error_code_from_name(p.code).value_or(ErrorCode::ChildUnreachable);
            node_error(hub.domain(),
                       "harvest of " + ph.session.child.str() + " failed: " + p.code + ": " + p.message, now);
            auto retry = hub.on_harvest_error(ph.session, code);
            if (retry) send_harvest_poll(hub, std::move(ph.session), *retry, now);
            return;
        }
        case wire::MsgType::Ack:
            return;  // description accepted
        default:
            node_error(hub.domain(), "unexpected " + std::string(wire::msg_type_name(env.msg_type)), now);
            return;
    }
}

void Simulation::root_handle(RootBroker& root, const wire::Envelope& env, SimTime now) {
    switch (env.msg_type) {
        case wire::MsgType::RegisterDescription: {
            const auto& p = std::get<wire::RegisterDescriptionPayload>(env.payload);
            wire::Envelope reply;
            reply.sender = root.domain();
            reply.recipient = env.sender;
            reply.request_id = env.request_id;
            try {
                root.register_collection(p.description);
                reply.msg_type = wire::MsgType::Ack;
                reply.payload = wire::AckPayload{};
                // The accepted description accounts for everything its subnet
                // had applied by as_of; those docs are now root-visible.
                auto applied = hub_applies_.find(p.description.collection);
                if (applied != hub_applies_.end()) {
                    for (const auto& [doc_id, at] : applied->second) {
                        if (at > p.description.as_of) continue;
                        auto doc = metrics_.docs.find(doc_id);
                        if (doc != metrics_.docs.end() && !doc->second.covered) doc->second.covered = now;
                    }
                }
            } catch (const DrisError& e) {
                node_error(root.domain(), e.what(), now);
                reply.msg_type = wire::MsgType::Error;
                reply.payload = wire::ErrorPayload{std::string(error_code_name(e.code())), e.what()};
            }
            send(std::move(reply), now);
            return;
        }
        case wire::MsgType::SearchResponse: {
            auto rpc = query_rpcs_.find(env.request_id);
            if (rpc == query_rpcs_.end()) return;  // past its timeout
            std::uint64_t query_id = rpc->second;
            DomainName target = query_rpc_targets_.at(env.request_id);
            query_rpcs_.erase(rpc);
            query_rpc_targets_.erase(env.request_id);

            const auto& p = std::get<wire::SearchResponsePayload>(env.payload);
            PendingQuery& pq = pending_queries_.at(query_id);
            if (root.on_response(pq.state, target, p.hits)) finish_query(query_id, now);
            return;
        }
        case wire::MsgType::Error: {
            auto rpc = query_rpcs_.find(env.request_id);
            if (rpc == query_rpcs_.end()) return;
            std::uint64_t query_id = rpc->second;
            DomainName target = query_rpc_targets_.at(env.request_id);
            query_rpcs_.erase(rpc);
            query_rpc_targets_.erase(env.request_id);

            const auto& p = std::get<wire::ErrorPayload>(env.payload);
            node_error(root.domain(), "fanout to " + target.str() + " failed: " + p.code + ": " + p.message,
                       now);
            PendingQuery& pq = pending_queries_.at(query_id);
            if (root.on_target_failed(pq.state, target)) finish_query(query_id, now);
            return;
        }
        default:
            node_error(root.domain(), "unexpected " + std::string(wire::msg_type_name(env.msg_type)), now);
            return;
    }
}

void Simulation::send_harvest_poll(HarvestNode& hub, HarvestSession session, const HarvestPoll& poll,
                                   SimTime now) {
    std::uint64_t rid = next_request_id();
    wire::Envelope env;
    env.msg_type = wire::MsgType::HarvestRequest;
    env.sender = hub.domain();
    env.recipient = session.child;
    env.request_id = rid;
    env.payload = wire::HarvestRequestPayload{poll.from_seq, poll.token};
    pending_harvests_.emplace(rid, PendingHarvest{hub.domain(), std::move(session)});
    send(std::move(env), now);

    Event timeout;
    timeout.t = now + config_.rpc_timeout_s * kMicrosPerSecond;
    timeout.kind = EvKind::RpcTimeout;
    timeout.request_id = rid;
    push_event(std::move(timeout));
}

void Simulation::push_description(HarvestNode& hub, SimTime now) {
    wire::Envelope env;
    env.msg_type = wire::MsgType::RegisterDescription;
    env.sender = hub.domain();
    env.recipient = hub.domain().parent();
    env.request_id = next_request_id();
    env.payload = wire::RegisterDescriptionPayload{hub.description(now)};
    send(std::move(env), now);
}

void Simulation::on_harvest_tick(const DomainName& hub_domain, SimTime now) {
    trace_.record(now, "timer", "harvest " + hub_domain.str());
    HarvestNode& hub = hubs_.at(hub_domain);
    for (const auto& [child, cursor] : hub.cursors()) {
        HarvestSession session = hub.begin_harvest(child);
        HarvestPoll poll = hub.poll_for(session);
        send_harvest_poll(hub, std::move(session), poll, now);
    }
    SimTime next = now + config_.harvest_period_s * kMicrosPerSecond;
    if (next <= end_time_us_) {
        Event ev;
        ev.t = next;
        ev.kind = EvKind::HarvestTick;
        ev.node = hub_domain;
        push_event(std::move(ev));
    }
}

void Simulation::on_push_tick(const DomainName& hub_domain, SimTime now) {
    trace_.record(now, "timer", "push " + hub_domain.str());
    push_description(hubs_.at(hub_domain), now);
    SimTime next = now + config_.push_period_s * kMicrosPerSecond;
    if (next <= end_time_us_) {
        Event ev;
        ev.t = next;
        ev.kind = EvKind::PushTick;
        ev.node = hub_domain;
        push_event(std::move(ev));
    }
}

void Simulation::on_rpc_timeout(std::uint64_t request_id, SimTime now) {
    auto it = pending_harvests_.find(request_id);
    if (it == pending_harvests_.end()) return;
    PendingHarvest ph = std::move(it->second);
    pending_harvests_.erase(it);
    HarvestNode& hub = hubs_.at(ph.hub);
    node_error(ph.hub, "harvest of " + ph.session.child.str() + " timed out", now);
    auto retry = hub.on_harvest_error(ph.session, ErrorCode::ChildUnreachable);
    if (retry) send_harvest_poll(hub, std::move(ph.session), *retry, now);
}

void Simulation::on_query_timeout(std::uint64_t request_id, SimTime now) {
    auto rpc = query_rpcs_.find(request_id);
    if (rpc == query_rpcs_.end()) return;
    std::uint64_t query_id = rpc->second;
    DomainName target = query_rpc_targets_.at(request_id);
    query_rpcs_.erase(rpc);
    query_rpc_targets_.erase(request_id);

    PendingQuery& pq = pending_queries_.at(query_id);
    node_error(pq.root, "fanout to " + target.str() + " timed out", now);
    if (roots_.at(pq.root).on_target_failed(pq.state, target)) finish_query(query_id, now);
}

void Simulation::finish_query(std::uint64_t query_id, SimTime now) {
    auto it = pending_queries_.find(query_id);
    PendingQuery pq = std::move(it->second);
    pending_queries_.erase(it);

    RootBroker::SearchResult result = roots_.at(pq.root).finish(pq.state);

    QueryRecord rec;
    rec.issued = pq.issued;
    rec.finished = now;
    rec.completed = true;
    rec.degraded = result.degraded;
    rec.result_count = result.hits.size();
    rec.vs_oracle = compare_topk(result.hits, pq.oracle_hits, pq.query.k);
    metrics_.queries.push_back(rec);

    trace_.record(now, "query_done",
                  "q" + std::to_string(query_id) + " hits=" + std::to_string(result.hits.size()) +
                      " degraded=" + (result.degraded ? std::string("true") : std::string("false")) +
                      " exact=" + (rec.vs_oracle.exact_match ? std::string("true") : std::string("false")));
}

}  // namespace dris
