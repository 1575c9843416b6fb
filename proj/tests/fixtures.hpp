#pragma once

#include <string>
#include <vector>

#include "dris/org_node.hpp"

namespace dris::fixtures {

inline Document make_doc(const std::string& doc_id, const std::string& owner, const std::string& body,
                         std::uint64_t modified = 0) {
    Document d;
    d.doc_id = doc_id;
    d.owner = DomainName::parse(owner);
    d.url = "http://" + owner + "/" + doc_id;
    d.title = doc_id;
    d.body = body;
    d.modified = modified;
    return d;
}

// The tiny corpus every ranking test scores by hand: with N = 3 docs,
// df(apple) = 2 and df(cherry) = 1, so
//   local(apple)  = tf * ln(1 + 3/2) = tf * 0.9162907318741551
//   local(cherry) = tf * ln(1 + 3/1) = tf * 1.3862943611198906
inline std::vector<Document> three_docs(const std::string& owner = "hust.edu.cn") {
    return {
        make_doc("d1", owner, "apple banana", 1),
        make_doc("d2", owner, "apple apple", 2),
        make_doc("d3", owner, "cherry", 3),
    };
}

inline OrgNode three_doc_org(const std::string& owner = "hust.edu.cn") {
    OrgNode org(DomainName::parse(owner));
    for (const Document& d : three_docs(owner)) org.upsert(d, seconds(d.modified));
    return org;
}

constexpr double kLnTwoPointFive = 0.9162907318741551;   // ln(2.5)
constexpr double kLnFour = 1.3862943611198906;           // ln(4)

}  // namespace dris::fixtures
