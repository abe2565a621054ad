#include <zlib.h>

#include <cstring>
#include <fstream>

#include "letterkit/facts.hpp"

namespace letterkit::facts {

namespace {

constexpr char kMagic[8] = {'L', 'K', 'S', 'N', 'A', 'P', 'S', 'H'};
constexpr std::uint32_t kFormatVersion = 1;

enum SectionId : std::uint32_t { kMeta = 1, kTriples = 2, kLocations = 3 };

[[noreturn]] void fail(SnapshotErrorCode code, std::string detail) {
    throw SnapshotError(code, std::move(detail));
}

// Integers are stored little-endian; this code assumes a little-endian host.
template <typename T>
void put(std::string& out, T v) {
    char buf[sizeof(T)];
    std::memcpy(buf, &v, sizeof(T));
    out.append(buf, sizeof(T));
}

void put_string(std::string& out, const std::string& s) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(s.size()));
    out += s;
}

std::uint32_t crc_of(std::string_view payload) {
    return static_cast<std::uint32_t>(
        ::crc32(0, reinterpret_cast<const Bytef*>(payload.data()),
                static_cast<uInt>(payload.size())));
}

void append_section(std::string& out, std::uint32_t id, const std::string& payload) {
    put<std::uint32_t>(out, id);
    put<std::uint64_t>(out, payload.size());
    out += payload;
    put<std::uint32_t>(out, crc_of(payload));
}

class Reader {
public:
    explicit Reader(std::string_view data) : data_(data) {}

    template <typename T>
    T get() {
        need(sizeof(T));
        T v;
        std::memcpy(&v, data_.data() + pos_, sizeof(T));
        pos_ += sizeof(T);
        return v;
    }

    std::string get_string() {
        const auto len = get<std::uint32_t>();
        need(len);
        std::string s(data_.substr(pos_, len));
        pos_ += len;
        return s;
    }

    bool done() const { return pos_ >= data_.size(); }
    std::size_t pos() const { return pos_; }

    std::string_view slice(std::size_t len) {
        need(len);
        auto s = data_.substr(pos_, len);
        pos_ += len;
        return s;
    }

private:
    void need(std::size_t n) {
        if (pos_ + n > data_.size())
            fail(SnapshotErrorCode::CorruptSnapshot, "truncated snapshot");
    }
    std::string_view data_;
    std::size_t pos_ = 0;
};

std::string encode_meta(const SnapshotMeta& meta) {
    std::string payload;
    put_string(payload, meta.restriction);
    put<std::uint32_t>(payload, static_cast<std::uint32_t>(meta.source_digests.size()));
    for (const auto& [name, digest] : meta.source_digests) {
        put_string(payload, name);
        put<std::uint64_t>(payload, digest);
    }
    return payload;
}

SnapshotMeta decode_meta(std::string_view payload) {
    Reader r(payload);
    SnapshotMeta meta;
    meta.restriction = r.get_string();
    const auto n = r.get<std::uint32_t>();
    for (std::uint32_t i = 0; i < n; ++i) {
        auto name = r.get_string();
        auto digest = r.get<std::uint64_t>();
        meta.source_digests.emplace_back(std::move(name), digest);
    }
    return meta;
}

std::string encode_triples(const std::vector<FactTriple>& triples) {
    std::string payload;
    put<std::uint64_t>(payload, triples.size());
    for (const auto& t : triples) {
        put_string(payload, t.subject);
        put_string(payload, t.predicate);
        put_string(payload, t.object.value);
        put_string(payload, t.object.lang);
        put<std::uint8_t>(payload, t.object.is_iri ? 1 : 0);
    }
    return payload;
}

std::vector<FactTriple> decode_triples(std::string_view payload) {
    Reader r(payload);
    const auto n = r.get<std::uint64_t>();
    std::vector<FactTriple> out;
    out.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) {
        FactTriple t;
        t.subject = r.get_string();
        t.predicate = r.get_string();
        t.object.value = r.get_string();
        t.object.lang = r.get_string();
        t.object.is_iri = r.get<std::uint8_t>() != 0;
        out.push_back(std::move(t));
    }
    return out;
}

std::string encode_locations(const std::vector<LocationRecord>& locations) {
    std::string payload;
    put<std::uint64_t>(payload, locations.size());
    for (const auto& rec : locations) {
        put_string(payload, rec.geo_id);
        put_string(payload, rec.name);
        put<std::uint32_t>(payload, static_cast<std::uint32_t>(rec.alternate_names.size()));
        for (const auto& alt : rec.alternate_names) put_string(payload, alt);
        put_string(payload, rec.latitude_text);
        put_string(payload, rec.longitude_text);
        put<double>(payload, rec.latitude);
        put<double>(payload, rec.longitude);
        put_string(payload, rec.feature_class);
        put<std::uint8_t>(payload, rec.population ? 1 : 0);
        put<std::int64_t>(payload, rec.population.value_or(0));
    }
    return payload;
}

std::vector<LocationRecord> decode_locations(std::string_view payload) {
    Reader r(payload);
    const auto n = r.get<std::uint64_t>();
    std::vector<LocationRecord> out;
    out.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) {
        LocationRecord rec;
        rec.geo_id = r.get_string();
        rec.name = r.get_string();
        const auto alts = r.get<std::uint32_t>();
        for (std::uint32_t k = 0; k < alts; ++k)
            rec.alternate_names.push_back(r.get_string());
        rec.latitude_text = r.get_string();
        rec.longitude_text = r.get_string();
        rec.latitude = r.get<double>();
        rec.longitude = r.get<double>();
        rec.feature_class = r.get_string();
        const bool has_pop = r.get<std::uint8_t>() != 0;
        const auto pop = r.get<std::int64_t>();
        if (has_pop) rec.population = pop;
        out.push_back(std::move(rec));
    }
    return out;
}

}  // namespace

SnapshotError::SnapshotError(SnapshotErrorCode code, std::string detail)
    : std::runtime_error([&] {
          switch (code) {
              case SnapshotErrorCode::VersionMismatch: return "VersionMismatch: ";
              case SnapshotErrorCode::CorruptSnapshot: return "CorruptSnapshot: ";
              case SnapshotErrorCode::Io: return "Io: ";
          }
          return "SnapshotError: ";
      }() + std::move(detail)),
      code_(code) {}

std::uint64_t digest_bytes(std::string_view bytes) {
    // FNV-1a 64.
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

void save_snapshot(const FactBase& base, const SnapshotMeta& meta,
                   const std::string& path) {
    std::string out;
    out.reserve(64 + base.triples.size() * 48);
    out.append(kMagic, sizeof(kMagic));
    put<std::uint32_t>(out, kFormatVersion);
    append_section(out, kMeta, encode_meta(meta));
    append_section(out, kTriples, encode_triples(base.triples));
    append_section(out, kLocations, encode_locations(base.locations));
    std::ofstream f(path, std::ios::binary);
    if (!f) fail(SnapshotErrorCode::Io, "cannot open " + path + " for writing");
    f.write(out.data(), static_cast<std::streamsize>(out.size()));
    f.close();
    if (!f) fail(SnapshotErrorCode::Io, "write failed for " + path);
}

FactBase load_snapshot(const std::string& path, SnapshotMeta* meta_out) {
    std::ifstream f(path, std::ios::binary);
    if (!f) fail(SnapshotErrorCode::Io, "cannot open " + path);
    std::string data((std::istreambuf_iterator<char>(f)),
                     std::istreambuf_iterator<char>());
    if (data.size() < sizeof(kMagic) + 4 ||
        std::memcmp(data.data(), kMagic, sizeof(kMagic)) != 0)
        fail(SnapshotErrorCode::CorruptSnapshot, "bad magic in " + path);
    Reader r(data);
    r.slice(sizeof(kMagic));
    const auto version = r.get<std::uint32_t>();
    if (version != kFormatVersion)
        fail(SnapshotErrorCode::VersionMismatch,
             "snapshot format " + std::to_string(version) + ", expected " +
                 std::to_string(kFormatVersion));
    SnapshotMeta meta;
    std::vector<FactTriple> triples;
    std::vector<LocationRecord> locations;
    bool have_triples = false, have_locations = false;
    while (!r.done()) {
        const auto id = r.get<std::uint32_t>();
        const auto len = r.get<std::uint64_t>();
        const auto payload = r.slice(len);
        const auto crc = r.get<std::uint32_t>();
        if (crc != crc_of(payload))
            fail(SnapshotErrorCode::CorruptSnapshot,
                 "checksum mismatch in section " + std::to_string(id));
        switch (id) {
            case kMeta: meta = decode_meta(payload); break;
            case kTriples:
                triples = decode_triples(payload);
                have_triples = true;
                break;
            case kLocations:
                locations = decode_locations(payload);
                have_locations = true;
                break;
            default:
                break;  // unknown sections are skipped
        }
    }
    if (!have_triples || !have_locations)
        fail(SnapshotErrorCode::CorruptSnapshot, "missing sections in " + path);
    if (meta_out) *meta_out = meta;
    return make_fact_base(std::move(triples), std::move(locations));
}

}  // namespace letterkit::facts
