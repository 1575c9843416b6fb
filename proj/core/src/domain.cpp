#include "dris/domain.hpp"

#include <cmath>

#include "dris/errors.hpp"

namespace dris {

namespace {

constexpr std::size_t kMaxLabels = 8;
constexpr std::size_t kMaxLabelLen = 63;

bool label_char(char c) {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-';
}

}  // namespace

DomainName DomainName::parse(std::string_view text) {
    if (text.empty()) throw_error(ErrorCode::MalformedDomain, "empty domain");

    DomainName d;
    std::string label;
    auto flush = [&] {
        if (label.empty()) throw_error(ErrorCode::MalformedDomain, "empty label in '" + std::string(text) + "'");
        if (label.size() > kMaxLabelLen)
            throw_error(ErrorCode::MalformedDomain, "label too long in '" + std::string(text) + "'");
        if (label.front() == '-' || label.back() == '-')
            throw_error(ErrorCode::MalformedDomain, "label with leading/trailing hyphen in '" + std::string(text) + "'");
        d.labels_.push_back(label);
        label.clear();
    };

    for (char raw : text) {
        char c = (raw >= 'A' && raw <= 'Z') ? static_cast<char>(raw - 'A' + 'a') : raw;
        if (c == '.') {
            flush();
        } else if (label_char(c)) {
            label.push_back(c);
        } else {
            throw_error(ErrorCode::MalformedDomain, "illegal character in '" + std::string(text) + "'");
        }
    }
    flush();

    if (d.labels_.size() > kMaxLabels)
        throw_error(ErrorCode::MalformedDomain, "more than 8 labels in '" + std::string(text) + "'");

    for (std::size_t i = 0; i < d.labels_.size(); ++i) {
        if (i) d.text_.push_back('.');
        d.text_ += d.labels_[i];
    }
    return d;
}

DomainName DomainName::parent() const {
    DomainName p;
    p.labels_.assign(labels_.begin() + 1, labels_.end());
    p.text_ = text_.substr(labels_.front().size() + 1);
    return p;
}

bool DomainName::under(const DomainName& ancestor) const {
    if (ancestor.labels_.size() > labels_.size()) return false;
    std::size_t shift = labels_.size() - ancestor.labels_.size();
    for (std::size_t i = 0; i < ancestor.labels_.size(); ++i) {
        if (labels_[shift + i] != ancestor.labels_[i]) return false;
    }
    return true;
}

std::string_view level_name(Level level) {
    switch (level) {
        case Level::Root: return "root";
        case Level::Subnet: return "subnet";
        case Level::Org: return "org";
    }
    return "?";
}

Level level_of(const DomainName& d, const LevelTable& table) {
    std::size_t n = d.depth();
    if (n <= table.root_max_labels) return Level::Root;
    if (n <= table.subnet_max_labels) return Level::Subnet;
    return Level::Org;
}

void validate_document(const Document& doc) {
    if (doc.doc_id.empty()) throw_error(ErrorCode::InvalidArgument, "doc_id must be non-empty");
    if (doc.owner.depth() == 0) throw_error(ErrorCode::InvalidArgument, "document owner missing");
    if (doc.body.size() > kMaxBodyBytes)
        throw_error(ErrorCode::InvalidArgument, "body exceeds " + std::to_string(kMaxBodyBytes) + " bytes");
}

void validate_query_terms(const Query& q) {
    if (q.terms.empty()) throw_error(ErrorCode::InvalidArgument, "query has no terms");
    for (const auto& t : q.terms) {
        if (t.empty()) throw_error(ErrorCode::InvalidArgument, "empty query term");
        for (char c : t) {
            if (!((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9')))
                throw_error(ErrorCode::InvalidArgument, "query term not normalized: '" + t + "'");
        }
    }
}

void validate_query(const Query& q) {
    validate_query_terms(q);
    if (q.k < 1 || q.k > kMaxQueryK)
        throw_error(ErrorCode::InvalidArgument, "k out of range: " + std::to_string(q.k));
}

std::string_view architecture_name(Architecture a) {
    switch (a) {
        case Architecture::Centralized: return "centralized";
        case Architecture::MetadataHarvest: return "metadata_harvest";
        case Architecture::Distributed: return "distributed";
    }
    return "?";
}

Architecture select_architecture(const SourceProfile& p, const ArchitectureThresholds& thresholds) {
    if (p.doc_count <= thresholds.size_small) return Architecture::Centralized;
    if (p.metadata_bytes_estimate <= thresholds.metadata_cap) return Architecture::MetadataHarvest;
    return Architecture::Distributed;
}

double idf(std::uint64_t n, std::uint64_t df) {
    return std::log(1.0 + static_cast<double>(n) / static_cast<double>(df));
}

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> out;
    std::string tok;
    for (char raw : text) {
        char c = (raw >= 'A' && raw <= 'Z') ? static_cast<char>(raw - 'A' + 'a') : raw;
        if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9')) {
            tok.push_back(c);
        } else if (!tok.empty()) {
            out.push_back(std::move(tok));
            tok.clear();
        }
    }
    if (!tok.empty()) out.push_back(std::move(tok));
    return out;
}

}  // namespace dris
