#include "dmt/memsys.hpp"

#include <algorithm>

#include "dmt/error.hpp"

namespace dmt {

Cache::Cache(const CacheConfig& cfg)
    : sets_(static_cast<std::uint64_t>(std::max<std::int64_t>(cfg.sets(), 1))), ways_(cfg.ways) {
  if (cfg.ways < 1 || cfg.line_bytes < 1 || cfg.size_bytes < cfg.line_bytes * cfg.ways)
    throw ParameterError(Stage::Memsys, "cache geometry " + std::to_string(cfg.size_bytes) + "B/" +
                                            std::to_string(cfg.line_bytes) + "B/" + std::to_string(cfg.ways) + "-way");
  ways_storage_.resize(sets_ * static_cast<std::uint64_t>(ways_));
}

bool Cache::contains(std::uint64_t line) const {
  auto* set = &ways_storage_[set_of(line) * static_cast<std::size_t>(ways_)];
  for (int w = 0; w < ways_; ++w)
    if (set[w].valid && set[w].line == line) return true;
  return false;
}

Cache::Result Cache::access(std::uint64_t line, bool make_dirty, bool allocate) {
  Result r;
  auto* set = &ways_storage_[set_of(line) * static_cast<std::size_t>(ways_)];
  ++clock_;
  for (int w = 0; w < ways_; ++w)
    if (set[w].valid && set[w].line == line) {
      set[w].stamp = clock_;
      set[w].dirty = set[w].dirty || make_dirty;
      r.hit = true;
      return r;
    }
  if (!allocate) return r;
  Way* victim = &set[0];
  for (int w = 0; w < ways_; ++w) {
    if (!set[w].valid) {
      victim = &set[w];
      break;
    }
    if (set[w].stamp < victim->stamp) victim = &set[w];
  }
  if (victim->valid && victim->dirty) {
    r.evicted_dirty = true;
    r.evicted_line = victim->line;
  }
  *victim = Way{line, clock_, true, make_dirty};
  return r;
}

MemorySystem::MemorySystem(const MemConfig& cfg, const std::vector<ArrayDecl>& arrays)
    : cfg_(cfg), l1_(cfg.l1), l2_(cfg.l2) {
  if (cfg.element_bytes < 1) throw ParameterError(Stage::Memsys, "element size must be positive");
  if (cfg.l1.line_bytes != cfg.l2.line_bytes)
    throw ParameterError(Stage::Memsys, "L1 and L2 line sizes must match");
  const auto line = static_cast<std::uint64_t>(cfg.l1.line_bytes);
  std::uint64_t next = 0;
  for (const auto& a : arrays) {
    arrays_[a.name] = ArrayInfo{next, a.extent};
    stats_.array_loads[a.name] = 0;
    stats_.array_stores[a.name] = 0;
    next += static_cast<std::uint64_t>(a.extent * cfg.element_bytes);
    next = (next + line - 1) / line * line;
  }
}

const MemorySystem::ArrayInfo& MemorySystem::info(std::string_view array) const {
  auto it = arrays_.find(array);
  if (it == arrays_.end()) throw ParameterError(Stage::Memsys, "unknown array '" + std::string(array) + "'");
  return it->second;
}

std::uint64_t MemorySystem::address(std::string_view array, std::int64_t index) const {
  return info(array).base + static_cast<std::uint64_t>(index * cfg_.element_bytes);
}

std::int64_t MemorySystem::extent(std::string_view array) const { return info(array).extent; }

void MemorySystem::l2_access(std::uint64_t line, bool make_dirty) {
  auto r = l2_.access(line, make_dirty, true);
  if (r.hit) {
    ++stats_.l2_hits;
  } else {
    ++stats_.l2_misses;
    ++stats_.dram_accesses;
  }
  if (r.evicted_dirty) {
    ++stats_.writebacks;
    ++stats_.dram_accesses;
  }
}

MemResponse MemorySystem::access(std::string_view array, std::int64_t index, bool is_store, std::int64_t cycle) {
  const auto& a = info(array);
  if (index < 0 || index >= a.extent)
    throw SimFault(std::string(array) + "[" + std::to_string(index) + "] outside [0, " + std::to_string(a.extent) + ")");
  auto key = std::string(array);
  if (is_store) {
    ++stats_.stores;
    ++stats_.array_stores[key];
  } else {
    ++stats_.loads;
    ++stats_.array_loads[key];
  }
  const std::uint64_t line = address(array, index) / static_cast<std::uint64_t>(cfg_.l1.line_bytes);
  MemResponse resp;
  resp.latency = cfg_.l1.latency;

  if (cfg_.bank_conflicts) {
    if (cycle != bank_cycle_) {
      bank_cycle_ = cycle;
      bank_use_.clear();
    }
    auto bank = static_cast<std::int64_t>(line % static_cast<std::uint64_t>(std::max(cfg_.l1.banks, 1)));
    int before = bank_use_[bank]++;
    if (before > 0) ++stats_.bank_conflicts;
    resp.latency += before;
  }

  const bool write_through = is_store && !cfg_.write_back;
  auto r = l1_.access(line, is_store && cfg_.write_back, !write_through);
  if (r.evicted_dirty) {
    ++stats_.writebacks;
    l2_access(r.evicted_line, true);
  }
  if (r.hit) {
    ++stats_.l1_hits;
    if (write_through) l2_access(line, true);
    return resp;
  }
  ++stats_.l1_misses;

  if (cfg_.mshr_limit > 0) {
    outstanding_.erase(outstanding_.begin(), outstanding_.upper_bound(cycle));
    if (static_cast<int>(outstanding_.size()) >= cfg_.mshr_limit) {
      auto wait = *outstanding_.begin() - cycle;
      stats_.mshr_stall_cycles += static_cast<std::uint64_t>(wait);
      resp.latency += static_cast<int>(wait);
      outstanding_.erase(outstanding_.begin());
    }
  }

  const bool l2_hit = l2_.contains(line);
  l2_access(line, write_through);
  resp.latency += cfg_.l2.latency;
  resp.level = MemLevel::L2;
  if (!l2_hit) {
    resp.latency += cfg_.dram_latency;
    resp.level = MemLevel::Dram;
  }
  if (cfg_.mshr_limit > 0) outstanding_.insert(cycle + resp.latency);
  return resp;
}

std::uint64_t per_array_load_count(const MemStats& stats, std::string_view array) {
  auto it = stats.array_loads.find(std::string(array));
  if (it == stats.array_loads.end())
    throw ParameterError(Stage::Memsys, "unknown array '" + std::string(array) + "'");
  return it->second;
}

}  // namespace dmt
