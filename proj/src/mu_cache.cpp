#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "fpr/errors.hpp"
#include "fpr/mu_stats.hpp"

namespace fpr {

namespace {

constexpr char kMagic[8] = {'F', 'P', 'R', 'M', 'U', 'v', '0', '1'};

std::uint64_t fnv1a(const std::string& s, std::uint64_t h = 0xcbf29ce484222325ULL) {
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

void put_u64(std::string& buf, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f64(std::string& buf, double d) {
    std::uint64_t v;
    std::memcpy(&v, &d, 8);
    put_u64(buf, v);
}

void put_vec(std::string& buf, const std::vector<double>& v) {
    put_u64(buf, v.size());
    for (double d : v) put_f64(buf, d);
}

struct Reader {
    const std::string& buf;
    std::size_t pos = 0;

    std::uint64_t u64() {
        if (pos + 8 > buf.size()) throw checksum_mismatch("mu cache: truncated record");
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) {
            v |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf[pos + i])) << (8 * i);
        }
        pos += 8;
        return v;
    }
    double f64() {
        const std::uint64_t v = u64();
        double d;
        std::memcpy(&d, &v, 8);
        return d;
    }
    std::vector<double> vec() {
        const std::uint64_t n = u64();
        if (n > (buf.size() - pos) / 8) throw checksum_mismatch("mu cache: truncated record");
        std::vector<double> v(n);
        for (auto& d : v) d = f64();
        return v;
    }
};

std::string payload_of(const GroupStatistics& s) {
    std::string p;
    put_u64(p, static_cast<std::uint64_t>(s.K));
    put_u64(p, static_cast<std::uint64_t>(s.interior_count));
    put_f64(p, s.beta_f);
    put_u64(p, s.n_samples);
    put_u64(p, s.provenance.seed);
    put_u64(p, s.provenance.grid_hash);
    put_f64(p, s.provenance.kappa);
    put_f64(p, s.provenance.min_dist_fraction);
    put_vec(p, s.mu_I_1);
    put_vec(p, s.mu_I_2);
    put_vec(p, s.stderr_I_1);
    put_vec(p, s.stderr_I_2);
    put_vec(p, s.mu_E_1);
    put_vec(p, s.mu_E_2);
    put_vec(p, s.stderr_E_1);
    put_vec(p, s.stderr_E_2);
    return p;
}

}  // namespace

std::string cache_key(const MuProvenance& prov, int K, int interior_count,
                      std::size_t n_samples) {
    std::string material;
    put_u64(material, prov.seed);
    put_u64(material, prov.grid_hash);
    put_f64(material, prov.kappa);
    put_f64(material, prov.min_dist_fraction);
    put_u64(material, static_cast<std::uint64_t>(K));
    put_u64(material, static_cast<std::uint64_t>(interior_count));
    put_u64(material, n_samples);
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a(material)));
    return buf;
}

void store_cached(const std::string& dir, const GroupStatistics& stats) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    const std::string key =
        cache_key(stats.provenance, stats.K, stats.interior_count, stats.n_samples);
    const std::string payload = payload_of(stats);
    std::string rec(kMagic, sizeof(kMagic));
    rec += payload;
    std::string tail;
    put_u64(tail, fnv1a(payload));
    rec += tail;

    const fs::path path = fs::path(dir) / (key + ".mustat");
    const fs::path tmp = fs::path(dir) / (key + ".mustat.tmp");
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        f.write(rec.data(), static_cast<std::streamsize>(rec.size()));
    }
    fs::rename(tmp, path);
}

std::optional<GroupStatistics> load_cached(const std::string& dir, const std::string& key) {
    namespace fs = std::filesystem;
    const fs::path path = fs::path(dir) / (key + ".mustat");
    std::ifstream f(path, std::ios::binary);
    if (!f) return std::nullopt;
    std::string rec((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    if (rec.size() < sizeof(kMagic) + 8 || std::memcmp(rec.data(), kMagic, sizeof(kMagic)) != 0) {
        throw checksum_mismatch("mu cache: bad magic in " + path.string());
    }
    const std::string payload = rec.substr(sizeof(kMagic), rec.size() - sizeof(kMagic) - 8);
    Reader tail{rec, rec.size() - 8};
    if (tail.u64() != fnv1a(payload)) {
        throw checksum_mismatch("mu cache: checksum mismatch in " + path.string());
    }

    Reader r{payload, 0};
    GroupStatistics s;
    s.K = static_cast<int>(r.u64());
    s.interior_count = static_cast<int>(r.u64());
    s.beta_f = r.f64();
    s.n_samples = r.u64();
    s.provenance.seed = r.u64();
    s.provenance.grid_hash = r.u64();
    s.provenance.kappa = r.f64();
    s.provenance.min_dist_fraction = r.f64();
    s.mu_I_1 = r.vec();
    s.mu_I_2 = r.vec();
    s.stderr_I_1 = r.vec();
    s.stderr_I_2 = r.vec();
    s.mu_E_1 = r.vec();
    s.mu_E_2 = r.vec();
    s.stderr_E_1 = r.vec();
    s.stderr_E_2 = r.vec();
    return s;
}

}  // namespace fpr
