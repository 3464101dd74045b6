#include "dmt/units.hpp"

#include "dmt/error.hpp"

namespace dmt {

MatchingStore::MatchingStore(int arity, FireRule rule) : arity_(arity), rule_(rule) {
  if (rule == FireRule::Mux && arity != 3) throw ParameterError(Stage::Sim, "mux matching needs 3 ports");
}

bool MatchingStore::insert(int port, const Token& token) {
  auto& slots = slots_[token.tid];
  if (slots.empty()) slots.resize(static_cast<std::size_t>(arity_));
  auto& slot = slots.at(static_cast<std::size_t>(port));
  if (slot) return false;
  slot = token;
  refresh(token.tid);
  return true;
}

bool MatchingStore::has(Tid tid, int port) const { return peek(tid, port) != nullptr; }

const Token* MatchingStore::peek(Tid tid, int port) const {
  auto it = slots_.find(tid);
  if (it == slots_.end()) return nullptr;
  const auto& slot = it->second[static_cast<std::size_t>(port)];
  return slot ? &*slot : nullptr;
}

void MatchingStore::refresh(Tid tid) {
  const auto& s = slots_.at(tid);
  bool ok = true;
  if (rule_ == FireRule::Strict) {
    for (const auto& slot : s) ok = ok && slot.has_value();
  } else {
    ok = s[0].has_value() && s[s[0]->value.truthy() ? 1 : 2].has_value();
  }
  if (ok) ready_.insert(tid);
}

std::optional<Tid> MatchingStore::lowest_ready() const {
  if (ready_.empty()) return std::nullopt;
  return *ready_.begin();
}

std::vector<std::optional<Token>> MatchingStore::take(Tid tid) {
  auto it = slots_.find(tid);
  if (it == slots_.end()) return std::vector<std::optional<Token>>(static_cast<std::size_t>(arity_));
  auto out = std::move(it->second);
  slots_.erase(it);
  ready_.erase(tid);
  return out;
}

std::size_t MatchingStore::residual() const {
  std::size_t n = 0;
  for (const auto& [tid, slots] : slots_)
    for (const auto& s : slots) n += s.has_value();
  return n;
}

std::vector<Tid> MatchingStore::waiting() const {
  std::vector<Tid> out;
  for (const auto& [tid, slots] : slots_)
    if (!ready_.count(tid)) out.push_back(tid);
  return out;
}

std::optional<std::pair<Tid, std::vector<std::optional<Token>>>> try_fire(MatchingStore& store) {
  auto tid = store.lowest_ready();
  if (!tid) return std::nullopt;
  return std::make_pair(*tid, store.take(*tid));
}

ElevatorUnit::ElevatorUnit(const Elevator& cfg, const ThreadSpace& space, std::int64_t capacity)
    : cfg_(cfg), space_(space), capacity_(cfg.spilled ? 0 : capacity) {}

std::optional<Tid> ElevatorUnit::target_of(Tid in) const {
  if (cfg_.role == ElevatorRole::Segment) {
    Tid t = in + cfg_.shift;
    if (t < 0 || t >= space_.block_size()) return std::nullopt;
    return t;
  }
  Tid src = in - cfg_.pre_shift;
  if (src < 0 || src >= space_.block_size()) return std::nullopt;
  return comm_target(space_, cfg_.delta, cfg_.window, src);
}

bool ElevatorUnit::injects_constant(Tid tid) const {
  if (cfg_.role != ElevatorRole::Whole && cfg_.role != ElevatorRole::Tail) return false;
  return !comm_source(space_, cfg_.delta, cfg_.window, tid).has_value();
}

ElevatorUnit::Accept ElevatorUnit::accept() {
  Accept a;
  if (staged_.empty()) return a;
  auto it = staged_.begin();
  auto target = target_of(it->first);
  if (target && !has_room()) return a;
  a.accepted = true;
  a.token = it->second;
  staged_.erase(it);
  ++received;
  if (!target) {
    a.dropped = true;
    ++drops;
    return a;
  }
  if (*target - a.token.tid != cfg_.shift) retag_law_ok = false;
  Token out{*target, a.token.value, -1, true};
  if (!pending_.emplace(*target, out).second)
    throw Error(Stage::Sim, "elevator received two tokens for tid " + std::to_string(*target));
  ++retags;
  ++occupancy_;
  max_occupancy_ = std::max(max_occupancy_, occupancy_);
  return a;
}

void ElevatorUnit::inject_constant(Tid tid) {
  if (!pending_.emplace(tid, Token{tid, cfg_.constant, -1, false}).second)
    throw Error(Stage::Sim, "elevator constant collides with a token for tid " + std::to_string(tid));
  ++constants;
}

std::vector<Token> ElevatorUnit::pop(int max) {
  std::vector<Token> out;
  while (max-- > 0 && !pending_.empty()) {
    out.push_back(pending_.begin()->second);
    pending_.erase(pending_.begin());
    ++emitted;
  }
  return out;
}

void ElevatorUnit::release() {
  if (occupancy_ <= 0) throw Error(Stage::Sim, "elevator released an empty slot");
  --occupancy_;
}

std::vector<Token> elevator_step(ElevatorUnit& unit, const std::optional<Token>& incoming) {
  if (incoming) unit.offer(*incoming);
  unit.accept();
  auto out = unit.pop(1);
  for (const auto& t : out)
    if (t.holds_slot) unit.release();
  return out;
}

EldstUnit::EldstUnit(const ELoadStore& cfg, const ThreadSpace& space, std::int64_t capacity)
    : cfg_(cfg), space_(space), capacity_(capacity), inputs_(cfg.ordered ? 3 : 2) {}

std::optional<Tid> EldstUnit::ready_tid() const {
  for (Tid t : inputs_.ready_set()) {
    const Token* en = inputs_.peek(t, 1);
    if (en->value.truthy() || dups_.count(t)) return t;
  }
  return std::nullopt;
}

EldstUnit::Fire EldstUnit::fire(Tid tid) {
  Fire f;
  f.tid = tid;
  f.operands = inputs_.take(tid);
  f.load = f.operands[1]->value.truthy();
  f.index = f.operands[0]->value.as_int() + cfg_.offset;
  fired_.insert(tid);
  auto it = dups_.find(tid);
  if (f.load) {
    if (it != dups_.end()) {
      ++discards;
      dups_.erase(it);
    }
    ++loads;
  } else {
    if (it == dups_.end()) throw Error(Stage::Sim, "eLDST fired a disabled thread without a forwarded value");
    f.value = it->second.value;
    f.load_id = it->second.load_id;
    dups_.erase(it);
    ++forwards;
  }
  return f;
}

bool EldstUnit::can_complete(Tid loader) const {
  auto target = comm_target(space_, cfg_.delta, cfg_.window, loader);
  if (!target || fired_.count(*target)) return true;
  return capacity_ <= 0 || static_cast<std::int64_t>(dups_.size()) < capacity_;
}

void EldstUnit::duplicate(Tid from, const Scalar& value, std::int64_t load_id) {
  auto target = comm_target(space_, cfg_.delta, cfg_.window, from);
  if (!target) {
    ++discards;
    return;
  }
  if (fired_.count(*target)) {
    ++discards;
    return;
  }
  if (capacity_ > 0 && static_cast<std::int64_t>(dups_.size()) >= capacity_)
    throw Error(Stage::Sim, "eLDST duplicate buffer overflow");
  if (!dups_.emplace(*target, Dup{value, load_id}).second)
    throw Error(Stage::Sim, "eLDST received two forwarded values for tid " + std::to_string(*target));
  max_occupancy_ = std::max(max_occupancy_, static_cast<std::int64_t>(dups_.size()));
}

std::int64_t EldstUnit::new_load(Tid) {
  consumers_.push_back(0);
  return static_cast<std::int64_t>(consumers_.size()) - 1;
}

}  // namespace dmt
