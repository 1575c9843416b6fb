#include "dris/canonical_json.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

#include "dris/errors.hpp"

namespace dris {

void JsonWriter::comma() {
    if (need_comma_) out_.push_back(',');
    need_comma_ = false;
}

JsonWriter& JsonWriter::begin_object() {
    comma();
    out_.push_back('{');
    return *this;
}

JsonWriter& JsonWriter::end_object() {
    out_.push_back('}');
    need_comma_ = true;
    return *this;
}

JsonWriter& JsonWriter::begin_array() {
    comma();
    out_.push_back('[');
    return *this;
}

JsonWriter& JsonWriter::end_array() {
    out_.push_back(']');
    need_comma_ = true;
    return *this;
}

JsonWriter& JsonWriter::key(std::string_view k) {
    comma();
    out_.push_back('"');
    append_json_escaped(out_, k);
    out_.push_back('"');
    out_.push_back(':');
    need_comma_ = false;
    return *this;
}

JsonWriter& JsonWriter::value(std::string_view s) {
    comma();
    out_.push_back('"');
    append_json_escaped(out_, s);
    out_.push_back('"');
    need_comma_ = true;
    return *this;
}

JsonWriter& JsonWriter::value(std::uint64_t v) {
    comma();
    char buf[24];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    out_.append(buf, res.ptr);
    need_comma_ = true;
    return *this;
}

JsonWriter& JsonWriter::value(std::int64_t v) {
    comma();
    char buf[24];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    out_.append(buf, res.ptr);
    need_comma_ = true;
    return *this;
}

JsonWriter& JsonWriter::value(bool v) {
    comma();
    out_.append(v ? "true" : "false");
    need_comma_ = true;
    return *this;
}

JsonWriter& JsonWriter::value(double v) {
    comma();
    out_.append(format_double(v));
    need_comma_ = true;
    return *this;
}

JsonWriter& JsonWriter::raw(std::string_view canonical) {
    comma();
    out_.append(canonical);
    need_comma_ = true;
    return *this;
}

void append_json_escaped(std::string& out, std::string_view s) {
    for (unsigned char c : s) {
        switch (c) {
            case '"': out.append("\\\""); break;
            case '\\': out.append("\\\\"); break;
            case '\b': out.append("\\b"); break;
            case '\t': out.append("\\t"); break;
            case '\n': out.append("\\n"); break;
            case '\f': out.append("\\f"); break;
            case '\r': out.append("\\r"); break;
            default:
                if (c < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x", c);
                    out.append(buf);
                } else {
                    out.push_back(static_cast<char>(c));
                }
        }
    }
}

std::string format_double(double v) {
    if (!std::isfinite(v)) throw_error(ErrorCode::InvalidArgument, "non-finite number in JSON");
    if (v == 0.0) return "0";  // collapse -0.0 so equal-comparing values encode equally
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed) {
    std::uint64_t h = seed;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t fnv1a64(std::string_view bytes) { return fnv1a64(bytes, 0xcbf29ce484222325ULL); }

std::string hex16(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<size_t>(i)] = digits[v & 0xf];
        v >>= 4;
    }
    return out;
}

}  // namespace dris
