#include "dris/federation.hpp"

#include "dris/errors.hpp"

namespace dris {

void Federation::register_node(const DomainName& domain, Level role) {
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
    order_.push_back(domain);
}

void Federation::register_node(const DomainName& domain) { register_node(domain, level_of(domain)); }

DomainName Federation::hub_of(const DomainName& org) const {
    DomainName d = org;
    while (d.depth() > 2) d = d.parent();
    if (!hubs_.count(d)) throw_error(ErrorCode::OrphanDomain, org.str() + " has no registered sub-network");
    return d;
}

OrgNode& Federation::org(const DomainName& d) { return orgs_.at(d); }
HarvestNode& Federation::hub(const DomainName& d) { return hubs_.at(d); }
RootBroker& Federation::root(const DomainName& d) { return roots_.at(d); }

void Federation::ingest(const Document& doc, SimTime now) {
    auto it = orgs_.find(doc.owner);
    if (it == orgs_.end())
        throw_error(ErrorCode::UnknownOwner, "no org node for " + doc.owner.str() + " (doc " + doc.doc_id + ")");
    it->second.upsert(doc, now);
}

void Federation::remove(const DomainName& owner, const std::string& doc_id, SimTime now) {
    auto it = orgs_.find(owner);
    if (it == orgs_.end()) throw_error(ErrorCode::UnknownOwner, "no org node for " + owner.str());
    it->second.remove(doc_id, now);
}

void Federation::harvest_all(SimTime now) {
    for (auto& [hub_domain, hub] : hubs_) {
        for (const auto& [child, cursor] : hub.cursors()) {
            OrgNode& child_org = orgs_.at(child);
            hub.run_harvest(child, now, [&child_org](std::uint64_t from_seq, const std::string& token) {
                return child_org.list_records(from_seq, token);
            });
        }
        roots_.at(hub_domain.parent()).register_collection(hub.description(now));
    }
}

RootBroker::SearchResult Federation::federated(const Query& q, std::uint32_t width, MergeMode mode) const {
    if (root_order_.empty()) throw_error(ErrorCode::InvalidArgument, "no root registered");
    const RootBroker& broker = roots_.at(root_order_.front());
    return federated_search(broker, q, width, mode,
                            [this](const DomainName& target, const Query& fq, std::uint32_t k)
                                -> std::optional<std::vector<ScoredHit>> {
                                auto it = hubs_.find(target);
                                if (it == hubs_.end()) return std::nullopt;
                                return it->second.search(fq, k);
                            });
}

std::vector<MetadataRecord> Federation::current_metadata() const {
    std::vector<MetadataRecord> all;
    for (const auto& [domain, org] : orgs_) {
        auto records = org.metadata_snapshot();
        all.insert(all.end(), std::make_move_iterator(records.begin()), std::make_move_iterator(records.end()));
    }
    return all;
}

}  // namespace dris
