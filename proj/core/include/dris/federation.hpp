#pragma once

#include <map>
#include <string>
#include <vector>

#include "dris/root_broker.hpp"

namespace dris {

// The whole tree wired together in process, driven synchronously: harvest
// rounds run to exhaustion and descriptions register immediately. The
// simulator owns timing questions; this owns end-state ones (and is what
// snapshots serialize).
class Federation {
public:
    // Parents before children. Throws RoleMismatch, OrphanDomain,
    // DuplicateDomain.
    void register_node(const DomainName& domain, Level role);
    void register_node(const DomainName& domain);

    bool has_node(const DomainName& domain) const { return registered_.count(domain) > 0; }

    // Upsert at the owning org. Throws UnknownOwner when no such org exists.
    void ingest(const Document& doc, SimTime now);
    void remove(const DomainName& owner, const std::string& doc_id, SimTime now);

    // Every hub pulls every child to exhaustion, then registers its
    // description (as_of = now) with its root.
    void harvest_all(SimTime now);

    // Fan out through the first root. width == 0 means every collection.
    RootBroker::SearchResult federated(const Query& q, std::uint32_t width, MergeMode mode) const;

    // Live metadata across every org, extracted fresh (doc_id order).
    std::vector<MetadataRecord> current_metadata() const;

    const std::map<DomainName, Level>& registered() const { return registered_; }
    const std::vector<DomainName>& registration_order() const { return order_; }
    const std::map<DomainName, OrgNode>& orgs() const { return orgs_; }
    const std::map<DomainName, HarvestNode>& hubs() const { return hubs_; }
    const std::map<DomainName, RootBroker>& roots() const { return roots_; }
    OrgNode& org(const DomainName& d);
    HarvestNode& hub(const DomainName& d);
    RootBroker& root(const DomainName& d);

private:
    DomainName hub_of(const DomainName& org) const;

    std::map<DomainName, Level> registered_;
    std::vector<DomainName> order_;
    std::map<DomainName, OrgNode> orgs_;
    std::map<DomainName, HarvestNode> hubs_;
    std::map<DomainName, RootBroker> roots_;
    std::vector<DomainName> root_order_;
};

}  // namespace dris
