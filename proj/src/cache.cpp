#include "ecstab/cache.hpp"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <iterator>
#include <optional>
#include <thread>

namespace ecstab {

namespace {

constexpr char kMagic[8] = {'E', 'C', 'S', 'T', 'R', 'C', '0', '1'};

template <class T>
void put(std::string& buf, T v) {
  unsigned char bytes[sizeof(T)];
  for (std::size_t i = 0; i < sizeof(T); ++i) bytes[i] = static_cast<unsigned char>(static_cast<u64>(v) >> (8 * i));
  buf.append(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <class T>
bool get(const std::string& buf, std::size_t& pos, T& out) {
  if (pos + sizeof(T) > buf.size()) return false;
  u64 v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<u64>(static_cast<unsigned char>(buf[pos + i])) << (8 * i);
  pos += sizeof(T);
  out = static_cast<T>(v);
  return true;
}

std::string encode(const std::string& key, const std::vector<TraceEntry>& entries) {
  std::string buf(kMagic, sizeof(kMagic));
  put<std::uint32_t>(buf, static_cast<std::uint32_t>(key.size()));
  buf += key;
  put<u64>(buf, entries.size());
  for (const auto& e : entries) {
    put<u64>(buf, e.ell);
    put<u64>(buf, static_cast<u64>(e.a));
  }
  put<u64>(buf, fnv1a(buf.data(), buf.size()));
  return buf;
}

// nullopt with a reason in `why` when anything is off.
std::optional<std::vector<TraceEntry>> decode(const std::string& buf, const std::string& key, std::string& why) {
  if (buf.size() < sizeof(kMagic) + 8 || std::memcmp(buf.data(), kMagic, sizeof(kMagic)) != 0) {
    why = "bad magic";
    return std::nullopt;
  }
  std::size_t body = buf.size() - 8;
  std::size_t pos = body;
  u64 stored = 0;
  get(buf, pos, stored);
  if (stored != fnv1a(buf.data(), body)) {
    why = "checksum mismatch";
    return std::nullopt;
  }
  pos = sizeof(kMagic);
  std::uint32_t klen = 0;
  if (!get(buf, pos, klen) || pos + klen > body || buf.compare(pos, klen, key) != 0) {
    why = "key mismatch";
    return std::nullopt;
  }
  pos += klen;
  u64 count = 0;
  if (!get(buf, pos, count) || count > (body - pos) / 16) {
    why = "truncated";
    return std::nullopt;
  }
  std::vector<TraceEntry> out(count);
  for (auto& e : out) {
    u64 a = 0;
    get(buf, pos, e.ell);
    get(buf, pos, a);
    e.a = static_cast<i64>(a);
    const double limit = 2.0 * std::sqrt(static_cast<double>(e.ell));
    if (static_cast<double>(e.a < 0 ? -e.a : e.a) > limit) {
      why = "Hasse bound violated at " + std::to_string(e.ell);
      return std::nullopt;
    }
  }
  return out;
}

}  // namespace

u64 fnv1a(const void* data, std::size_t len, u64 seed) {
  const auto* p = static_cast<const unsigned char*>(data);
  u64 h = seed;
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::vector<TraceEntry> compute_traces(const CurveQ& curve, const TraceRequest& req, const CountOptions& options,
                                       unsigned threads) {
  if (req.modulus == 0) throw InputError("modulus must be positive");
  std::vector<u64> primes;
  const u64 lo = std::max<u64>(req.lo, 3);
  for (u64 ell = lo + (req.modulus + req.residue % req.modulus - lo % req.modulus) % req.modulus; ell <= req.hi;
       ell += req.modulus) {
    if (is_prime(ell) && curve.discriminant() % static_cast<i128>(ell) != 0) primes.push_back(ell);
    if (req.hi - ell < req.modulus) break;
  }
  std::vector<TraceEntry> out(primes.size());
  auto work = [&](std::size_t begin, std::size_t step) {
    for (std::size_t i = begin; i < primes.size(); i += step) {
      const u64 l = primes[i];
      out[i] = {l, frobenius_trace(CurveFp{l, reduce(curve.a(), l), reduce(curve.b(), l)}, options)};
    }
  };
  threads = std::max(1u, threads);
  if (threads == 1 || primes.size() < 64) {
    work(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work, t, threads);
    for (auto& th : pool) th.join();
  }
  return out;
}

std::string cache_key(const CurveQ& curve, const TraceRequest& req) {
  return std::to_string(curve.a()) + "," + std::to_string(curve.b()) + ":" + std::to_string(req.lo) + "-" +
         std::to_string(req.hi) + ":" + std::to_string(req.residue) + "mod" + std::to_string(req.modulus);
}

SweepCache::SweepCache(std::filesystem::path dir) : dir_(std::move(dir)) {}

SweepCache SweepCache::from_environment() {
  const char* env = std::getenv("ECSTAB_CACHE_DIR");
  return SweepCache(env ? std::filesystem::path(env) : std::filesystem::path());
}

std::filesystem::path SweepCache::path_for(const CurveQ& curve, const TraceRequest& req) const {
  const std::string key = cache_key(curve, req);
  char name[32];
  std::snprintf(name, sizeof(name), "%016llx.trc", static_cast<unsigned long long>(fnv1a(key.data(), key.size())));
  return dir_ / name;
}

std::vector<TraceEntry> SweepCache::get_or_compute(const CurveQ& curve, const TraceRequest& req,
                                                   const CountOptions& options, unsigned threads) {
  if (dir_.empty()) {
    ++misses_;
    return compute_traces(curve, req, options, threads);
  }
  const std::string key = cache_key(curve, req);
  const auto path = path_for(curve, req);
  if (std::filesystem::exists(path)) {
    std::ifstream f(path, std::ios::binary);
    std::string buf((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    std::string why;
    if (auto entries = decode(buf, key, why)) {
      ++hits_;
      return *entries;
    }
    warnings_.push_back("cache file " + path.string() + " unusable (" + why + "); recomputing");
    ++recomputed_;
  } else {
    ++misses_;
  }
  auto entries = compute_traces(curve, req, options, threads);
  std::filesystem::create_directories(dir_);
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    const std::string buf = encode(key, entries);
    f.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  }
  std::filesystem::rename(tmp, path);
  return entries;
}

}  // namespace ecstab
