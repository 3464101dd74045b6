#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "dmt/graph.hpp"

namespace dmt {

/// A tagged token. `release` identifies the producer buffer slot this token
/// holds until every consumer has used it (-1: none).
struct Token {
  Tid tid = 0;
  Scalar value;
  int release = -1;
  bool holds_slot = false;  // popped from a buffer slot that must be released
};

enum class FireRule {
  Strict,  // all ports present
  Mux,     // port 0 plus the port it selects (1 when true, 2 when false)
};

/// Per-unit operand matching: tokens wait here until their tid's operand set
/// is complete. Unbounded.
class MatchingStore {
 public:
  explicit MatchingStore(int arity = 1, FireRule rule = FireRule::Strict);

  int arity() const noexcept { return arity_; }
  /// Adds a token; returns false if the slot is already occupied.
  bool insert(int port, const Token& token);
  bool has(Tid tid, int port) const;
  const Token* peek(Tid tid, int port) const;
  bool ready(Tid tid) const { return ready_.count(tid) > 0; }
  const std::set<Tid>& ready_set() const noexcept { return ready_; }
  std::optional<Tid> lowest_ready() const;
  /// Removes and returns the operand slots of `tid` (absent ports are nullopt).
  std::vector<std::optional<Token>> take(Tid tid);
  std::size_t residual() const;
  /// Tids holding a partial operand set.
  std::vector<Tid> waiting() const;

 private:
  void refresh(Tid tid);

  int arity_;
  FireRule rule_;
  std::map<Tid, std::vector<std::optional<Token>>> slots_;
  std::set<Tid> ready_;
};

/// Fires the lowest ready tid, consuming its operands. nullopt when none is ready.
std::optional<std::pair<Tid, std::vector<std::optional<Token>>>> try_fire(MatchingStore& store);

/// Elevator controller: retags tid -> tid + shift through a token buffer of
/// `capacity` slots (unbounded when capacity <= 0), injects the constant for
/// receivers without a valid producer and drops tokens without a valid receiver.
class ElevatorUnit {
 public:
  ElevatorUnit(const Elevator& cfg, const ThreadSpace& space, std::int64_t capacity);

  const Elevator& config() const noexcept { return cfg_; }
  bool bounded() const noexcept { return capacity_ > 0; }
  std::int64_t capacity() const noexcept { return capacity_; }

  /// Token arriving on the input link; it waits there until accepted.
  void offer(const Token& token) { staged_.emplace(token.tid, token); }
  bool has_staged() const noexcept { return !staged_.empty(); }
  std::size_t staged() const noexcept { return staged_.size(); }

  struct Accept {
    bool accepted = false;
    bool dropped = false;
    Token token;  // the accepted input (carries the upstream release handle)
  };
  /// Takes the lowest staged token if a slot is free (drops never need one).
  Accept accept();

  /// True when `tid` has no valid producer and this stage injects the constant.
  bool injects_constant(Tid tid) const;
  bool has_room() const noexcept { return !bounded() || occupancy_ < capacity_; }
  /// Queues the constant for `tid`. Constants are generated by the controller
  /// and do not occupy a buffer slot.
  void inject_constant(Tid tid);

  bool has_ready() const noexcept { return !pending_.empty(); }
  /// Pops up to `max` ready tokens, lowest tid first. Retagged tokens keep
  /// their slot (holds_slot) until release() is called for each.
  std::vector<Token> pop(int max);
  void release();

  std::int64_t occupancy() const noexcept { return occupancy_; }
  std::int64_t max_occupancy() const noexcept { return max_occupancy_; }

  std::uint64_t received = 0;   // tokens accepted from the input
  std::uint64_t emitted = 0;    // tokens popped (including constants)
  std::uint64_t constants = 0;  // constant injections
  std::uint64_t drops = 0;      // boundary tokens discarded
  std::uint64_t retags = 0;     // accepted tokens buffered under a new tag
  bool retag_law_ok = true;

 private:
  std::optional<Tid> target_of(Tid in) const;

  Elevator cfg_;
  ThreadSpace space_;
  std::int64_t capacity_;
  std::multimap<Tid, Token> staged_;
  std::map<Tid, Token> pending_;
  std::int64_t occupancy_ = 0;
  std::int64_t max_occupancy_ = 0;
};

/// Single-step convenience over ElevatorUnit: offers `incoming`, accepts and
/// pops one token, releasing it immediately (the consumer is assumed ready).
std::vector<Token> elevator_step(ElevatorUnit& unit, const std::optional<Token>& incoming);

/// eLDST: enabled threads load; each loaded value is duplicated to tid + delta
/// inside the window group, where a disabled thread picks it up and forwards
/// it again. Duplicates wait in a buffer of `capacity` slots.
class EldstUnit {
 public:
  EldstUnit(const ELoadStore& cfg, const ThreadSpace& space, std::int64_t capacity);

  const ELoadStore& config() const noexcept { return cfg_; }
  MatchingStore& inputs() noexcept { return inputs_; }
  const MatchingStore& inputs() const noexcept { return inputs_; }

  /// Lowest tid whose operands are present and that is either enabled or
  /// already holds its forwarded value.
  std::optional<Tid> ready_tid() const;

  struct Fire {
    Tid tid = 0;
    bool load = false;        // enabled: issue a memory load
    std::int64_t index = 0;   // element index (offset applied)
    Scalar value;             // forwarded value when !load
    std::int64_t load_id = -1;
    std::vector<std::optional<Token>> operands;
  };
  Fire fire(Tid tid);

  /// Whether a response for `loader` can be completed now (room for its duplicate).
  bool can_complete(Tid loader) const;
  /// Records a loaded (or forwarded) value leaving `from`: buffers its duplicate
  /// for the next thread in the window, or discards it.
  void duplicate(Tid from, const Scalar& value, std::int64_t load_id);
  /// Allocates a load id for a value fetched by `loader`.
  std::int64_t new_load(Tid loader);
  void consumed(std::int64_t load_id) { ++consumers_[static_cast<std::size_t>(load_id)]; }

  std::int64_t occupancy() const noexcept { return static_cast<std::int64_t>(dups_.size()); }
  std::int64_t max_occupancy() const noexcept { return max_occupancy_; }
  const std::vector<std::uint64_t>& consumers_per_load() const noexcept { return consumers_; }
  std::size_t residual() const { return dups_.size() + inputs_.residual(); }

  std::uint64_t loads = 0;
  std::uint64_t forwards = 0;
  std::uint64_t discards = 0;

 private:
  struct Dup {
    Scalar value;
    std::int64_t load_id;
  };
  ELoadStore cfg_;
  ThreadSpace space_;
  std::int64_t capacity_;
  MatchingStore inputs_;
  std::map<Tid, Dup> dups_;
  std::set<Tid> fired_;
  std::vector<std::uint64_t> consumers_;
  std::int64_t max_occupancy_ = 0;
};

}  // namespace dmt
