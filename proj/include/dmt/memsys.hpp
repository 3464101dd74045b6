#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "dmt/graph.hpp"

namespace dmt {

struct CacheConfig {
  std::int64_t size_bytes = 0;
  std::int64_t line_bytes = 128;
  int ways = 4;
  int banks = 1;
  int latency = 1;

  std::int64_t sets() const noexcept { return size_bytes / (line_bytes * ways); }
};

struct MemConfig {
  CacheConfig l1{64 * 1024, 128, 4, 32, 4};
  CacheConfig l2{786 * 1024, 128, 16, 6, 20};
  int dram_latency = 100;
  int dram_banks = 8;
  bool write_back = true;       // false: write-through, no write-allocate
  bool bank_conflicts = false;  // serialize same-bank accesses within a cycle
  int mshr_limit = 0;           // outstanding L1 misses; 0 = unlimited
  std::int64_t element_bytes = 8;
};

struct MemStats {
  std::uint64_t loads = 0;
  std::uint64_t stores = 0;
  std::uint64_t l1_hits = 0;
  std::uint64_t l1_misses = 0;
  std::uint64_t l2_hits = 0;
  std::uint64_t l2_misses = 0;
  std::uint64_t dram_accesses = 0;
  std::uint64_t writebacks = 0;
  std::uint64_t bank_conflicts = 0;
  std::uint64_t mshr_stall_cycles = 0;
  std::map<std::string, std::uint64_t> array_loads;
  std::map<std::string, std::uint64_t> array_stores;

  std::uint64_t l1_accesses() const noexcept { return l1_hits + l1_misses; }
  std::uint64_t l2_accesses() const noexcept { return l2_hits + l2_misses; }
};

enum class MemLevel { L1, L2, Dram };

struct MemResponse {
  int latency = 0;
  MemLevel level = MemLevel::L1;
};

/// One set-associative LRU cache level.
class Cache {
 public:
  explicit Cache(const CacheConfig& cfg);

  struct Result {
    bool hit = false;
    bool evicted_dirty = false;
    std::uint64_t evicted_line = 0;
  };
  /// Looks up `line`; on a miss with `allocate` installs it, evicting the LRU way.
  Result access(std::uint64_t line, bool make_dirty, bool allocate);
  bool contains(std::uint64_t line) const;
  std::size_t set_of(std::uint64_t line) const noexcept { return static_cast<std::size_t>(line % sets_); }

 private:
  struct Way {
    std::uint64_t line = 0;
    std::uint64_t stamp = 0;
    bool valid = false;
    bool dirty = false;
  };
  std::uint64_t sets_;
  int ways_;
  std::vector<Way> ways_storage_;
  std::uint64_t clock_ = 0;
};

/// Timing and traffic model of the L1/L2/DRAM hierarchy. Data values live in
/// the simulator's memory image; this class only decides latencies and counts.
class MemorySystem {
 public:
  MemorySystem(const MemConfig& cfg, const std::vector<ArrayDecl>& arrays);

  /// Byte address of an element. Throws ParameterError for unknown arrays.
  std::uint64_t address(std::string_view array, std::int64_t index) const;
  std::int64_t extent(std::string_view array) const;

  /// Performs one element access issued at `cycle`. `index` must be in range.
  MemResponse access(std::string_view array, std::int64_t index, bool is_store, std::int64_t cycle = 0);

  const MemStats& stats() const noexcept { return stats_; }
  const MemConfig& config() const noexcept { return cfg_; }

 private:
  struct ArrayInfo {
    std::uint64_t base;
    std::int64_t extent;
  };
  const ArrayInfo& info(std::string_view array) const;
  void l2_access(std::uint64_t line, bool make_dirty);

  MemConfig cfg_;
  std::map<std::string, ArrayInfo, std::less<>> arrays_;
  Cache l1_;
  Cache l2_;
  MemStats stats_;
  std::int64_t bank_cycle_ = -1;
  std::map<std::int64_t, int> bank_use_;
  std::multiset<std::int64_t> outstanding_;
};

/// Element loads issued to `array` before any cache filtering. Unknown array
/// names raise ParameterError.
std::uint64_t per_array_load_count(const MemStats& stats, std::string_view array);

}  // namespace dmt
