#pragma once

// On-disk cache of Frobenius traces over prime ranges.
//
// One file per key. Layout (little endian):
//   magic "ECSTRC01", u32 key length, key bytes, u64 entry count,
//   entries of (u64 ell, i64 a_ell), u64 FNV-1a checksum of everything before it.

#include <filesystem>
#include <string>
#include <vector>

#include "ecstab/curve.hpp"

namespace ecstab {

struct TraceEntry {
  u64 ell = 0;
  i64 a = 0;
  friend bool operator==(const TraceEntry&, const TraceEntry&) = default;
};

struct TraceRequest {
  u64 lo = 3;
  u64 hi = 0;
  /// Only primes ell = residue mod modulus are computed.
  u64 modulus = 1;
  u64 residue = 0;
};

/// Traces a_ell for primes ell in the request range with ell >= 3 and good
/// reduction, ascending. Work is split over `threads` workers.
std::vector<TraceEntry> compute_traces(const CurveQ& curve, const TraceRequest& req, const CountOptions& options = {},
                                       unsigned threads = 1);

u64 fnv1a(const void* data, std::size_t len, u64 seed = 0xcbf29ce484222325ULL);

class SweepCache {
 public:
  /// An empty directory disables persistence (every call computes).
  explicit SweepCache(std::filesystem::path dir);

  /// Directory from ECSTAB_CACHE_DIR, or empty.
  static SweepCache from_environment();

  std::vector<TraceEntry> get_or_compute(const CurveQ& curve, const TraceRequest& req,
                                         const CountOptions& options = {}, unsigned threads = 1);

  std::filesystem::path path_for(const CurveQ& curve, const TraceRequest& req) const;
  const std::filesystem::path& dir() const { return dir_; }

  std::size_t hits() const { return hits_; }
  std::size_t misses() const { return misses_; }
  std::size_t recomputed() const { return recomputed_; }
  const std::vector<std::string>& warnings() const { return warnings_; }

 private:
  std::filesystem::path dir_;
  std::size_t hits_ = 0;
  std::size_t misses_ = 0;
  std::size_t recomputed_ = 0;
  std::vector<std::string> warnings_;
};

std::string cache_key(const CurveQ& curve, const TraceRequest& req);

}  // namespace ecstab
