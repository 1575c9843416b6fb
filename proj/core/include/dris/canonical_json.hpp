#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace dris {

// Canonical JSON: object keys in byte-lexicographic order, no insignificant
// whitespace, strings escaped minimally (\" \\ \b \t \n \f \r, other control
// bytes as \u00xx), integers in plain decimal, doubles in shortest
// round-trip form via std::to_chars. Every encoder in the project goes
// through this writer so equal values always produce equal bytes.
class JsonWriter {
public:
    JsonWriter& begin_object();
    JsonWriter& end_object();
    JsonWriter& begin_array();
    JsonWriter& end_array();

    // Caller must emit keys in byte-lexicographic order within each object.
    JsonWriter& key(std::string_view k);

    JsonWriter& value(std::string_view s);
    JsonWriter& value(const char* s) { return value(std::string_view(s)); }
    JsonWriter& value(std::uint64_t v);
    JsonWriter& value(std::int64_t v);
    JsonWriter& value(bool v);
    // Rejects NaN and infinities (InvalidArgument).
    JsonWriter& value(double v);

    // Splices an already-canonical encoding in value position.
    JsonWriter& raw(std::string_view canonical);

    const std::string& str() const { return out_; }
    std::string take() { return std::move(out_); }

private:
    void comma();
    std::string out_;
    bool need_comma_ = false;
};

void append_json_escaped(std::string& out, std::string_view s);
std::string format_double(double v);

// FNV-1a 64-bit. Used for envelope digests and trace hashes; pinned here so
// any other implementation of the protocol can reproduce the same values.
std::uint64_t fnv1a64(std::string_view bytes);
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed);
std::string hex16(std::uint64_t v);

}  // namespace dris
