#include "dmt/sim.hpp"

#include <algorithm>
#include <memory>
#include <ostream>
#include <random>
#include <sstream>

#include "dmt/error.hpp"
#include "dmt/frontend.hpp"
#include "dmt/units.hpp"

namespace dmt {

double SimStats::utilization(NodeId node) const {
  if (cycles <= 0 || node < 0 || static_cast<std::size_t>(node) >= node_firings.size()) return 0.0;
  return std::min(1.0, static_cast<double>(node_firings[static_cast<std::size_t>(node)]) / static_cast<double>(cycles));
}

bool SimStats::conservation_ok() const {
  return std::all_of(audits.begin(), audits.end(), [](const CommAudit& a) { return a.balance() == 0; });
}

MemoryImage prepare_memory(const DataflowGraph& graph, const MemoryImage& image) {
  MemoryImage mem;
  for (const auto& a : graph.arrays()) {
    auto it = image.find(a.name);
    if (it == image.end()) {
      mem[a.name].assign(static_cast<std::size_t>(a.extent), Scalar::zero(a.type));
      continue;
    }
    if (static_cast<std::int64_t>(it->second.size()) != a.extent)
      throw ParameterError(Stage::Sim, "array '" + a.name + "' has " + std::to_string(it->second.size()) +
                                           " elements, expected " + std::to_string(a.extent));
    auto& dst = mem[a.name];
    for (const auto& v : it->second) dst.push_back(v.convert(a.type));
  }
  for (const auto& [name, data] : image)
    if (!graph.find_array(name)) throw ParameterError(Stage::Sim, "input for undeclared array '" + name + "'");
  return mem;
}

namespace {

struct Delivery {
  NodeId dst;
  int port;
  Token token;
};

struct Response {
  std::int64_t ready;
  NodeId node;
  Tid tid;
  Scalar value;
  std::int64_t load_id;
};

struct Rt {
  const Node* node = nullptr;
  UnitClass cls = UnitClass::Alu;
  int latency = 1;
  std::vector<std::vector<std::size_t>> outs;  // per output port: edge indices
  std::unique_ptr<MatchingStore> store;
  std::unique_ptr<ElevatorUnit> elev;
  std::unique_ptr<EldstUnit> eldst;
  std::int64_t next_fire = 0;
  std::uint64_t firings = 0;
  std::uint64_t commits = 0;
  std::set<Tid> closed;  // Mux: tids already selected
};

class Simulator {
 public:
  Simulator(const DataflowGraph& g, const Mapping& m, const GridConfig& grid, const MemoryImage& inputs,
            const SimOptions& opt)
      : g_(g), m_(m), grid_(grid), opt_(opt), space_(g.thread_space()), mem_(prepare_memory(g, inputs)),
        memsys_(grid.mem, g.arrays()), rng_(opt.seed) {
    if (m.placement.size() != g.size() || m.routes.size() != g.edges().size())
      throw ParameterError(Stage::Sim, "mapping does not match graph");
    if (opt.issue_limit && *opt.issue_limit < 1) throw ParameterError(Stage::Sim, "issue limit must be >= 1");
    block_ = space_.block_size();
    rt_.resize(g.size());
    for (const auto& n : g.nodes()) {
      auto& r = rt_[static_cast<std::size_t>(n.id)];
      r.node = &n;
      r.cls = m.placement[static_cast<std::size_t>(n.id)].cls;
      r.outs.resize(static_cast<std::size_t>(output_arity(n.kind)));
      r.latency = latency_of(n.kind);
      if (const auto* e = std::get_if<Elevator>(&n.kind)) {
        r.elev = std::make_unique<ElevatorUnit>(*e, space_, grid.token_buffer);
        if (e->spilled) ++stats_.spills;
        elevators_.push_back(n.id);
      } else if (const auto* l = std::get_if<ELoadStore>(&n.kind)) {
        r.eldst = std::make_unique<EldstUnit>(*l, space_, grid.token_buffer);
      } else if (std::holds_alternative<TidSource>(n.kind) || std::holds_alternative<ConstSource>(n.kind)) {
        sources_.push_back(n.id);
        continue;
      } else {
        const auto* c = std::get_if<Control>(&n.kind);
        bool mux = c && c->op == Opcode::Mux;
        r.store = std::make_unique<MatchingStore>(input_arity(n.kind), mux ? FireRule::Mux : FireRule::Strict);
      }
      if (std::holds_alternative<Sink>(n.kind)) sinks_.push_back(n.id);
      units_.push_back(n.id);
    }
    for (std::size_t i = 0; i < g.edges().size(); ++i) {
      const auto& e = g.edges()[i];
      rt_[static_cast<std::size_t>(e.src)].outs[static_cast<std::size_t>(e.src_port)].push_back(i);
    }
    max_cycles_ = opt.max_cycles > 0 ? opt.max_cycles
                                     : std::max<std::int64_t>(1000, 10 * block_ * static_cast<std::int64_t>(g.size()));
    stats_.threads = block_;
    stats_.buffer_capacity = grid.token_buffer;
  }

  SimResult run() {
    std::int64_t cycle = 0;
    std::int64_t last_activity = 0;
    int idle = 0;
    for (;; ++cycle) {
      if (cycle > max_cycles_) throw DeadlockError("watchdog: no completion after " + std::to_string(max_cycles_) +
                                                   " cycles; " + report());
      bool progress = false;
      // 1. releases from the previous cycle
      for (NodeId p : releases_) rt_[static_cast<std::size_t>(p)].elev->release();
      progress = progress || !releases_.empty();
      releases_.clear();
      // 2. arrivals
      auto ev = events_.find(cycle);
      if (ev != events_.end()) {
        for (const auto& d : ev->second) deliver(d, cycle);
        events_.erase(ev);
        progress = true;
      }
      // 3. memory responses
      progress = responses(cycle) || progress;
      // 4. injection
      progress = inject(cycle) || progress;
      // 5. units
      budget_ = opt_.issue_limit ? *opt_.issue_limit : -1;
      order_ = units_;
      std::shuffle(order_.begin(), order_.end(), rng_);
      for (NodeId id : order_) progress = step(id, cycle) || progress;
      // 6. capacity
      check_capacity();
      if (progress) {
        last_activity = cycle;
        idle = 0;
        continue;
      }
      if (events_.empty() && responses_.empty() && releases_.empty() && next_tid_ >= block_ &&
          ++idle > grid_.initiation_interval)
        break;
    }
    stats_.cycles = last_activity + 1;
    for (NodeId s : sinks_)
      if (rt_[static_cast<std::size_t>(s)].commits != static_cast<std::uint64_t>(block_))
        throw DeadlockError("threads stalled at cycle " + std::to_string(cycle) + "; " + report());
    finish();
    return SimResult{std::move(mem_), std::move(stats_)};
  }

 private:
  int latency_of(const NodeKind& k) const {
    switch (unit_class_of(k)) {
      case UnitClass::Alu: return grid_.alu_latency;
      case UnitClass::Fpu: return grid_.fpu_latency;
      case UnitClass::Special: return grid_.special_latency;
      case UnitClass::SplitJoin: return grid_.splitjoin_latency;
      case UnitClass::ControlElevator:
        return std::holds_alternative<Elevator>(k) ? grid_.elevator_latency : grid_.control_latency;
      case UnitClass::Lvc: return 2 * grid_.effective_lvc_latency();
      default: return 1;
    }
  }

  void trace(const std::string& line) {
    if (opt_.trace) *opt_.trace << line << "\n";
  }

  std::string where(NodeId id) const {
    const auto& n = *rt_[static_cast<std::size_t>(id)].node;
    std::string s = "node " + std::to_string(id) + " (" + std::string(kind_name(n.kind));
    if (!n.label.empty()) s += " " + n.label;
    return s + ")";
  }

  // ---- token movement ----
  void consume(const Token& t) {
    if (t.release < 0) return;
    auto& rel = rel_[static_cast<std::size_t>(t.release)];
    if (--rel.second == 0) {
      releases_.push_back(rel.first);
      free_rel_.push_back(t.release);
    }
  }

  void emit(NodeId src, int port, Tid tid, const Scalar& value, std::int64_t cycle, int latency,
            bool hold_slot = false) {
    auto& r = rt_[static_cast<std::size_t>(src)];
    const auto& edges = r.outs[static_cast<std::size_t>(port)];
    int rel = -1;
    if (hold_slot) {
      if (edges.empty()) {
        releases_.push_back(src);
      } else {
        if (free_rel_.empty()) {
          rel = static_cast<int>(rel_.size());
          rel_.emplace_back(src, 0);
        } else {
          rel = free_rel_.back();
          free_rel_.pop_back();
        }
        rel_[static_cast<std::size_t>(rel)] = {src, static_cast<int>(edges.size())};
      }
    }
    if (tid < 0 || tid >= block_) stats_.tag_preserved = false;
    for (std::size_t ei : edges) {
      const auto& e = g_.edges()[ei];
      const auto& route = m_.routes[ei];
      stats_.noc_hops += route.hops.size();
      events_[cycle + latency + route.latency].push_back(Delivery{e.dst, e.dst_port, Token{tid, value, rel, false}});
    }
    if (opt_.trace) {
      std::ostringstream os;
      os << cycle << " emit node=" << src << " port=" << port << " tid=" << tid << " value=" << to_string(value);
      trace(os.str());
    }
  }

  void deliver(const Delivery& d, std::int64_t) {
    ++stats_.tokens_delivered;
    auto& r = rt_[static_cast<std::size_t>(d.dst)];
    if (r.elev) {
      r.elev->offer(d.token);
      return;
    }
    if (r.eldst) {
      if (!r.eldst->inputs().insert(d.port, d.token))
        throw Error(Stage::Sim, "duplicate operand for tid " + std::to_string(d.token.tid) + " at " + where(d.dst));
      return;
    }
    if (r.closed.count(d.token.tid)) {
      consume(d.token);
      return;
    }
    if (!r.store->insert(d.port, d.token))
      throw Error(Stage::Sim, "duplicate operand for tid " + std::to_string(d.token.tid) + " at " + where(d.dst));
    if (const auto* c = std::get_if<Control>(&r.node->kind); c && c->op == Opcode::Mux) {
      // A selector that picks the other port makes this operand dead on arrival.
      const Token* sel = r.store->peek(d.token.tid, 0);
      if (sel && d.port != 0) {
        int chosen = sel->value.truthy() ? 1 : 2;
        if (d.port != chosen) discard_unselected(r, d.token.tid, d.port);
      } else if (d.port == 0) {
        int other = d.token.value.truthy() ? 2 : 1;
        if (r.store->has(d.token.tid, other)) discard_unselected(r, d.token.tid, other);
      }
    }
  }

  void discard_unselected(Rt& r, Tid tid, int port) {
    // Take the tid's slots, drop the dead one and re-insert the rest.
    auto slots = r.store->take(tid);
    consume(*slots[static_cast<std::size_t>(port)]);
    for (int p = 0; p < 3; ++p)
      if (p != port && slots[static_cast<std::size_t>(p)]) r.store->insert(p, *slots[static_cast<std::size_t>(p)]);
  }

  // ---- injection ----
  bool inject(std::int64_t cycle) {
    if (next_tid_ >= block_) return false;
    const Tid t = next_tid_;
    for (NodeId e : elevators_) {
      auto& u = *rt_[static_cast<std::size_t>(e)].elev;
      if (u.injects_constant(t)) {
        u.inject_constant(t);
        trace(std::to_string(cycle) + " const node=" + std::to_string(e) + " tid=" + std::to_string(t));
      }
    }
    const Coords c = space_.delinearize(t);
    for (NodeId s : sources_) {
      const auto& kind = rt_[static_cast<std::size_t>(s)].node->kind;
      Scalar v;
      if (const auto* ts = std::get_if<TidSource>(&kind))
        v = Scalar::of_int(ts->dim == TidSource::kLinearTid ? t : c[static_cast<std::size_t>(ts->dim)]);
      else
        v = std::get<ConstSource>(kind).value;
      emit(s, 0, t, v, cycle, 0);
    }
    trace(std::to_string(cycle) + " inject tid=" + std::to_string(t));
    ++next_tid_;
    return true;
  }

  // ---- memory ----
  std::int64_t check_index(NodeId id, Tid tid, const std::string& array, std::int64_t index) {
    const auto extent = static_cast<std::int64_t>(mem_.at(array).size());
    if (index < 0 || index >= extent)
      throw SimFault("thread " + std::to_string(tid) + " at " + where(id) + " accesses " + array + "[" +
                     std::to_string(index) + "] outside [0, " + std::to_string(extent) + ")");
    return index;
  }

  bool responses(std::int64_t cycle) {
    bool progress = false;
    for (auto it = responses_.begin(); it != responses_.end();) {
      if (it->ready > cycle) {
        ++it;
        continue;
      }
      auto& u = *rt_[static_cast<std::size_t>(it->node)].eldst;
      if (!u.can_complete(it->tid)) {
        ++it;
        continue;
      }
      emit(it->node, 0, it->tid, it->value, cycle, 1);
      emit(it->node, 1, it->tid, Scalar::of_int(0), cycle, 1);
      u.consumed(it->load_id);
      u.duplicate(it->tid, it->value, it->load_id);
      it = responses_.erase(it);
      progress = true;
    }
    return progress;
  }

  // ---- units ----
  bool take_budget() {
    if (budget_ == 0) return false;
    if (budget_ > 0) --budget_;
    return true;
  }

  void fired(Rt& r, NodeId id, Tid tid, std::int64_t cycle) {
    ++r.firings;
    r.next_fire = cycle + grid_.initiation_interval;
    if (opt_.trace) trace(std::to_string(cycle) + " fire node=" + std::to_string(id) + " unit=" +
                          std::to_string(m_.placement[static_cast<std::size_t>(id)].unit) + " " +
                          std::string(kind_name(r.node->kind)) + " tid=" + std::to_string(tid));
  }

  bool step(NodeId id, std::int64_t cycle) {
    auto& r = rt_[static_cast<std::size_t>(id)];
    if (r.elev) return step_elevator(r, id, cycle);
    if (cycle < r.next_fire) return false;
    if (r.eldst) {
      auto tid = r.eldst->ready_tid();
      if (!tid || !take_budget()) return false;
      auto f = r.eldst->fire(*tid);
      for (const auto& op : f.operands)
        if (op) consume(*op);
      fired(r, id, *tid, cycle);
      const auto& cfg = r.eldst->config();
      if (f.load) {
        check_index(id, *tid, cfg.array, f.index);
        Scalar v = mem_.at(cfg.array)[static_cast<std::size_t>(f.index)];
        auto resp = memsys_.access(cfg.array, f.index, false, cycle);
        responses_.push_back(Response{cycle + resp.latency, id, *tid, v, r.eldst->new_load(*tid)});
      } else {
        emit(id, 0, *tid, f.value, cycle, r.latency);
        emit(id, 1, *tid, Scalar::of_int(0), cycle, r.latency);
        r.eldst->consumed(f.load_id);
        r.eldst->duplicate(*tid, f.value, f.load_id);
      }
      return true;
    }
    auto tid = r.store->lowest_ready();
    if (!tid || !take_budget()) return false;
    auto ops = r.store->take(*tid);
    for (const auto& op : ops)
      if (op) consume(*op);
    fired(r, id, *tid, cycle);
    execute(r, id, *tid, ops, cycle);
    return true;
  }

  bool step_elevator(Rt& r, NodeId id, std::int64_t cycle) {
    auto& u = *r.elev;
    bool progress = false;
    auto a = u.accept();
    if (a.accepted) {
      consume(a.token);
      progress = true;
      if (a.dropped) trace(std::to_string(cycle) + " drop node=" + std::to_string(id) + " tid=" + std::to_string(a.token.tid));
    }
    if (cycle < r.next_fire || !u.has_ready() || !take_budget()) return progress;
    auto out = u.pop(grid_.elevator_pops);
    fired(r, id, out.front().tid, cycle);
    for (const auto& t : out) {
      if (u.config().spilled) stats_.lvc_accesses += 2;
      emit(id, 0, t.tid, t.value, cycle, r.latency, u.bounded() && t.holds_slot);
    }
    return true;
  }

  void execute(Rt& r, NodeId id, Tid tid, const std::vector<std::optional<Token>>& ops, std::int64_t cycle) {
    auto val = [&](std::size_t p) { return ops[p]->value; };
    const auto& kind = r.node->kind;
    if (const auto* a = std::get_if<ArithOp>(&kind)) {
      compute(id, tid, a->op, ops, cycle, r.latency);
    } else if (const auto* f = std::get_if<FloatOp>(&kind)) {
      compute(id, tid, f->op, ops, cycle, r.latency);
    } else if (const auto* c = std::get_if<Control>(&kind)) {
      if (c->op == Opcode::Mux) {
        r.closed.insert(tid);
        int chosen = val(0).truthy() ? 1 : 2;
        int other = 3 - chosen;
        if (ops[static_cast<std::size_t>(other)]) r.closed.erase(tid);  // both arrived: nothing more will come
        emit(id, 0, tid, val(static_cast<std::size_t>(chosen)), cycle, r.latency);
      } else if (c->op == Opcode::Steer) {
        if (!val(0).truthy()) emit(id, 0, tid, val(1), cycle, r.latency);
      } else {
        compute(id, tid, c->op, ops, cycle, r.latency);
      }
    } else if (const auto* ls = std::get_if<LoadStore>(&kind)) {
      bool enabled = !ls->predicated || val(static_cast<std::size_t>(enable_port(kind))).truthy();
      if (!enabled) {
        emit(id, 0, tid, Scalar::zero(g_.find_array(ls->array)->type), cycle, 1);
        emit(id, 1, tid, Scalar::of_int(0), cycle, 1);
        return;
      }
      auto index = check_index(id, tid, ls->array, val(0).as_int() + ls->offset);
      auto& cell = mem_.at(ls->array)[static_cast<std::size_t>(index)];
      auto resp = memsys_.access(ls->array, index, false, cycle);
      emit(id, 0, tid, cell, cycle, resp.latency);
      emit(id, 1, tid, Scalar::of_int(0), cycle, resp.latency);
    } else if (const auto* s = std::get_if<Sink>(&kind)) {
      ++r.commits;
      bool enabled = !s->predicated || val(static_cast<std::size_t>(enable_port(kind))).truthy();
      int latency = 1;
      if (enabled) {
        auto index = check_index(id, tid, s->array, val(0).as_int() + s->offset);
        mem_.at(s->array)[static_cast<std::size_t>(index)] = val(1).convert(g_.find_array(s->array)->type);
        latency = memsys_.access(s->array, index, true, cycle).latency;
      }
      emit(id, 0, tid, Scalar::of_int(0), cycle, latency);
    } else if (std::holds_alternative<SplitJoin>(kind)) {
      emit(id, 0, tid, Scalar::of_int(0), cycle, r.latency);
    }
  }

  void compute(NodeId id, Tid tid, Opcode op, const std::vector<std::optional<Token>>& ops, std::int64_t cycle,
               int latency) {
    Scalar args[3];
    const int n = static_cast<int>(ops.size());
    for (int i = 0; i < n; ++i) args[i] = ops[static_cast<std::size_t>(i)]->value;
    emit(id, 0, tid, apply_opcode(op, args, n), cycle, latency);
  }

  void check_capacity() {
    for (NodeId e : elevators_) {
      const auto& u = *rt_[static_cast<std::size_t>(e)].elev;
      if (u.bounded() && u.occupancy() > u.capacity())
        throw Error(Stage::Sim, "capacity violation: " + where(e) + " holds " + std::to_string(u.occupancy()) + " tokens");
    }
    for (NodeId id : units_) {
      const auto& r = rt_[static_cast<std::size_t>(id)];
      if (r.eldst && r.eldst->occupancy() > grid_.token_buffer)
        throw Error(Stage::Sim, "capacity violation: " + where(id) + " holds " + std::to_string(r.eldst->occupancy()) +
                                    " duplicates");
    }
  }

  std::string report() const {
    std::ostringstream os;
    os << "injected " << next_tid_ << "/" << block_ << " threads";
    int listed = 0;
    for (NodeId id : units_) {
      const auto& r = rt_[static_cast<std::size_t>(id)];
      std::vector<Tid> waiting;
      if (r.store) waiting = r.store->waiting();
      if (r.eldst) {
        waiting = r.eldst->inputs().waiting();
        for (Tid t : r.eldst->inputs().ready_set()) waiting.push_back(t);
      }
      std::size_t staged = r.elev ? r.elev->staged() : 0;
      if (waiting.empty() && staged == 0) continue;
      if (listed++ == 8) {
        os << "; ...";
        break;
      }
      os << "; " << where(id);
      if (staged) os << " staged=" << staged << " occupancy=" << r.elev->occupancy();
      if (!waiting.empty()) {
        os << " waiting tids=[";
        for (std::size_t i = 0; i < waiting.size() && i < 6; ++i) os << (i ? "," : "") << waiting[i];
        if (waiting.size() > 6) os << ",...";
        os << "]";
      }
    }
    for (NodeId s : sinks_)
      os << "; sink " << s << " committed " << rt_[static_cast<std::size_t>(s)].commits << "/" << block_;
    return os.str();
  }

  void finish() {
    stats_.node_firings.assign(g_.size(), 0);
    std::map<std::int32_t, CommAudit> audits;
    for (NodeId id : units_) {
      const auto& r = rt_[static_cast<std::size_t>(id)];
      stats_.node_firings[static_cast<std::size_t>(id)] = r.firings;
      stats_.total_firings += r.firings;
      stats_.firings_by_class[std::string(unit_class_name(r.cls))] += r.firings;
      if (r.store) stats_.residual_tokens += r.store->residual();
      if (r.elev) {
        const auto& u = *r.elev;
        const auto& cfg = u.config();
        stats_.retagged += u.retags;
        stats_.constants += u.constants;
        stats_.drops += u.drops;
        stats_.retag_law = stats_.retag_law && u.retag_law_ok;
        stats_.residual_tokens += u.staged();
        if (u.bounded()) stats_.max_buffer_occupancy = std::max(stats_.max_buffer_occupancy, u.max_occupancy());
        auto& a = audits[cfg.comm_id >= 0 ? cfg.comm_id : -1 - id];
        a.comm_id = cfg.comm_id;
        if (cfg.pre_shift == 0) a.received += u.received;
        if (cfg.role != ElevatorRole::Segment) {
          a.emitted += u.emitted;
          a.constants += u.constants;
        }
        a.drops += u.drops;
      }
      if (r.eldst) {
        const auto& u = *r.eldst;
        stats_.eldst_loads += u.loads;
        stats_.eldst_forwards += u.forwards;
        stats_.eldst_discards += u.discards;
        stats_.residual_tokens += u.residual();
        stats_.max_buffer_occupancy = std::max(stats_.max_buffer_occupancy, u.max_occupancy());
        for (auto c : u.consumers_per_load()) ++stats_.reuse_histogram[c];
      }
    }
    for (auto& [id, a] : audits) stats_.audits.push_back(a);
    stats_.mem = memsys_.stats();
  }

  const DataflowGraph& g_;
  const Mapping& m_;
  const GridConfig& grid_;
  SimOptions opt_;
  ThreadSpace space_;
  MemoryImage mem_;
  MemorySystem memsys_;
  std::mt19937_64 rng_;
  std::int64_t block_ = 0;
  std::int64_t max_cycles_ = 0;
  std::vector<Rt> rt_;
  std::vector<NodeId> units_, order_, sources_, elevators_, sinks_;
  std::map<std::int64_t, std::vector<Delivery>> events_;
  std::vector<Response> responses_;
  std::vector<std::pair<NodeId, int>> rel_;
  std::vector<int> free_rel_;
  std::vector<NodeId> releases_;
  Tid next_tid_ = 0;
  int budget_ = -1;
  SimStats stats_;
};

}  // namespace

SimResult simulate(const DataflowGraph& graph, const Mapping& mapping, const GridConfig& grid,
                   const MemoryImage& inputs, const SimOptions& options) {
  return Simulator(graph, mapping, grid, inputs, options).run();
}

}  // namespace dmt
