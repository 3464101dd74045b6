#include "dmt/mapper.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <ostream>
#include <queue>

#include "dmt/error.hpp"

namespace dmt {

CascadePlan cascade_plan(std::int64_t linear_delta, std::int64_t capacity) {
  if (linear_delta == 0) throw ParameterError(Stage::Mapper, "cascade of a zero delta");
  if (capacity < 1) throw ParameterError(Stage::Mapper, "token buffer capacity must be >= 1");
  CascadePlan plan;
  std::int64_t left = linear_delta < 0 ? -linear_delta : linear_delta;
  plan.total = left;
  while (left > 0) {
    auto s = std::min(left, capacity);
    plan.segments.push_back(s);
    left -= s;
  }
  return plan;
}

std::vector<std::pair<std::int64_t, std::int64_t>> partition_windows(std::int64_t block_size, std::int64_t window) {
  if (window < 1 || window > block_size)
    throw ParameterError(Stage::Mapper, "window " + std::to_string(window) + " outside [1, " +
                                            std::to_string(block_size) + "]");
  std::vector<std::pair<std::int64_t, std::int64_t>> groups;
  for (std::int64_t lo = 0; lo < block_size; lo += window) groups.emplace_back(lo, std::min(lo + window, block_size));
  return groups;
}

namespace {

void redirect_outputs(DataflowGraph& g, NodeId from, int port, NodeId to, int to_port) {
  for (auto& e : g.edges())
    if (e.src == from && e.src_port == port) {
      e.src = to;
      e.src_port = to_port;
    }
}

// Builds stages 2..k of a chain that starts at `first` (already configured as stage 1).
NodeId build_chain(DataflowGraph& g, NodeId first, const Elevator& proto, const std::vector<std::int64_t>& shifts,
                   ElevatorRole last_role) {
  NodeId prev = first;
  std::int64_t pre = 0;
  for (std::size_t i = 0; i < shifts.size(); ++i) {
    Elevator e = proto;
    e.shift = shifts[i];
    e.pre_shift = pre;
    e.role = i + 1 == shifts.size() ? last_role : ElevatorRole::Segment;
    pre += shifts[i];
    if (i == 0) {
      g.node(first).kind = e;
      continue;
    }
    NodeId n = g.add_node(e, g.node(first).label + "#" + std::to_string(i));
    g.connect(prev, 0, n, 0);
    prev = n;
  }
  return prev;
}

std::vector<std::int64_t> signed_segments(std::int64_t shift, std::int64_t capacity) {
  auto plan = cascade_plan(shift, capacity);
  if (shift < 0)
    for (auto& s : plan.segments) s = -s;
  return plan.segments;
}

}  // namespace

ExpandResult expand_comm(const DataflowGraph& graph, const GridConfig& grid) {
  const auto& space = graph.thread_space();
  const std::int64_t cap = grid.token_buffer;
  if (cap < 1) throw ParameterError(Stage::Mapper, "token buffer capacity must be >= 1");

  std::int64_t controls = static_cast<std::int64_t>(graph.count_kind<Control>());
  for (const auto& n : graph.nodes()) {
    if (const auto* e = std::get_if<Elevator>(&n.kind)) partition_windows(space.block_size(), e->window);
    if (const auto* l = std::get_if<ELoadStore>(&n.kind)) {
      partition_windows(space.block_size(), l->window);
      if (std::llabs(delta_to_linear(l->delta, space)) > cap) controls += 2;
    }
  }
  std::int64_t avail = std::max<std::int64_t>(0, grid.control_elevator_units - controls);

  ExpandResult out{graph, {}, 0, 0};
  DataflowGraph& g = out.graph;
  std::int32_t next_comm = 0;
  for (const auto& n : graph.nodes())
    if (const auto* e = std::get_if<Elevator>(&n.kind)) next_comm = std::max(next_comm, e->comm_id + 1);

  const auto original = static_cast<NodeId>(graph.size());
  for (NodeId id = 0; id < original; ++id) {
    const NodeKind kind = graph.node(id).kind;
    if (const auto* e = std::get_if<Elevator>(&kind)) {
      if (e->role != ElevatorRole::Whole || e->spilled) continue;
      const std::int64_t shift = delta_to_linear(e->delta, space);
      auto& el = std::get<Elevator>(g.node(id).kind);
      el.shift = shift;
      if (shift == 0) {
        if (avail >= 1) --avail;
        else out.overflow.push_back(id);
        continue;
      }
      auto segs = signed_segments(shift, cap);
      const auto need = static_cast<std::int64_t>(segs.size());
      if (need > avail) {
        out.overflow.push_back(id);
        continue;
      }
      avail -= need;
      if (segs.size() == 1) continue;
      ++out.cascades;
      Elevator proto = el;
      const std::size_t edges_before = g.edges().size();
      NodeId tail = build_chain(g, id, proto, segs, ElevatorRole::Tail);
      // Consumers of the original node now read from the tail; the internal
      // chain edges were appended after edges_before.
      for (std::size_t i = 0; i < edges_before; ++i) {
        auto& edge = g.edges()[i];
        if (edge.src == id) edge.src = tail;
      }
    } else if (const auto* l = std::get_if<ELoadStore>(&kind)) {
      const std::int64_t shift = delta_to_linear(l->delta, space);
      if (std::llabs(shift) <= cap) continue;
      ++out.loops;
      const auto* decl = graph.find_array(l->array);
      const ScalarKind type = decl ? decl->type : ScalarKind::Int;
      const std::string label = graph.node(id).label;
      const auto en = graph.driver(id, 1);
      if (!en) throw ParameterError(Stage::Mapper, "eLDST node " + std::to_string(id) + " has no enable input");

      g.node(id).kind = LoadStore{l->array, false, l->offset, true, l->ordered};
      NodeId mux = g.add_node(Control{Opcode::Mux}, label + ".mux");
      redirect_outputs(g, id, 0, mux, 0);
      g.connect(en->src, en->src_port, mux, 0);
      g.connect(id, 0, mux, 1);

      Elevator proto;
      proto.delta = l->delta;
      proto.constant = Scalar::zero(type);
      proto.window = l->window;
      proto.comm_id = next_comm++;
      auto segs = signed_segments(shift, cap);
      bool fits = static_cast<std::int64_t>(segs.size()) <= avail;
      if (!fits) segs = {shift};
      else avail -= static_cast<std::int64_t>(segs.size());
      NodeId first = g.add_node(proto, label + ".fwd");
      g.connect(mux, 0, first, 0);
      NodeId last = build_chain(g, first, proto, segs, ElevatorRole::LoopTail);
      if (!fits) out.overflow.push_back(first);
      NodeId steer = g.add_node(Control{Opcode::Steer}, label + ".steer");
      g.connect(en->src, en->src_port, steer, 0);
      g.connect(last, 0, steer, 1);
      g.connect(steer, 0, mux, 2);
    }
  }
  return out;
}

std::size_t spill(DataflowGraph& graph, const std::vector<NodeId>& overflow) {
  std::size_t n = 0;
  for (NodeId id : overflow) {
    auto* e = std::get_if<Elevator>(&graph.node(id).kind);
    if (!e) throw ParameterError(Stage::Mapper, "spill target " + std::to_string(id) + " is not an elevator");
    if (!e->spilled) {
      e->spilled = true;
      ++n;
    }
  }
  return n;
}

std::string_view unit_class_name(UnitClass cls) noexcept {
  switch (cls) {
    case UnitClass::Alu: return "alu";
    case UnitClass::Fpu: return "fpu";
    case UnitClass::Special: return "special";
    case UnitClass::Ldst: return "ldst";
    case UnitClass::SplitJoin: return "splitjoin";
    case UnitClass::ControlElevator: return "control_elevator";
    case UnitClass::Lvc: return "lvc";
    case UnitClass::Injector: return "injector";
  }
  return "?";
}

UnitClass unit_class_of(const NodeKind& kind) noexcept {
  struct V {
    UnitClass operator()(const ArithOp&) const { return UnitClass::Alu; }
    UnitClass operator()(const FloatOp& f) const {
      return f.op == Opcode::Div || f.op == Opcode::Sqrt || f.op == Opcode::Exp || f.op == Opcode::Rem
                 ? UnitClass::Special
                 : UnitClass::Fpu;
    }
    UnitClass operator()(const LoadStore&) const { return UnitClass::Ldst; }
    UnitClass operator()(const ELoadStore&) const { return UnitClass::Ldst; }
    UnitClass operator()(const Sink&) const { return UnitClass::Ldst; }
    UnitClass operator()(const Elevator& e) const { return e.spilled ? UnitClass::Lvc : UnitClass::ControlElevator; }
    UnitClass operator()(const Control&) const { return UnitClass::ControlElevator; }
    UnitClass operator()(const SplitJoin&) const { return UnitClass::SplitJoin; }
    UnitClass operator()(const ConstSource&) const { return UnitClass::Injector; }
    UnitClass operator()(const TidSource&) const { return UnitClass::Injector; }
  };
  return std::visit(V{}, kind);
}

std::size_t Mapping::used_units(UnitClass cls) const {
  std::size_t n = 0;
  for (const auto& p : placement) n += p.cls == cls && p.unit >= 0;
  return n;
}

std::size_t Mapping::total_hops() const {
  std::size_t n = 0;
  for (const auto& r : routes) n += r.hops.size();
  return n;
}

std::vector<Unit> grid_layout(const GridConfig& grid) {
  const std::pair<UnitClass, int> inventory[] = {
      {UnitClass::Alu, grid.alus},           {UnitClass::Fpu, grid.fpus},
      {UnitClass::Special, grid.special_units}, {UnitClass::Ldst, grid.ldst_units},
      {UnitClass::SplitJoin, grid.splitjoin_units}, {UnitClass::ControlElevator, grid.control_elevator_units},
  };
  const int total = grid.total_units();
  const int cols = std::max(grid.grid_cols, 1);
  std::vector<Unit> units;
  int placed[6] = {0, 0, 0, 0, 0, 0};
  for (int k = 0; k < total; ++k) {
    int best = -1;
    double best_deficit = 0;
    for (int c = 0; c < 6; ++c) {
      if (placed[c] >= inventory[c].second) continue;
      double deficit = static_cast<double>(inventory[c].second) * (k + 1) / total - placed[c];
      if (best < 0 || deficit > best_deficit + 1e-12) {
        best = c;
        best_deficit = deficit;
      }
    }
    ++placed[best];
    units.push_back(Unit{k, inventory[best].first, k / cols, k % cols});
  }
  return units;
}

namespace {

Route xy_route(int r0, int c0, int r1, int c1, int hop_latency) {
  Route route;
  int r = r0, c = c0;
  while (c != c1) {
    c += c1 > c ? 1 : -1;
    route.hops.emplace_back(r, c);
  }
  while (r != r1) {
    r += r1 > r ? 1 : -1;
    route.hops.emplace_back(r, c);
  }
  route.latency = std::max(1, static_cast<int>(route.hops.size()) * hop_latency);
  return route;
}

}  // namespace

Mapping place_and_route(const DataflowGraph& graph, const GridConfig& grid) {
  Mapping m;
  m.units = grid_layout(grid);
  m.cols = std::max(grid.grid_cols, 1);
  m.rows = static_cast<int>((m.units.size() + static_cast<std::size_t>(m.cols) - 1) / static_cast<std::size_t>(m.cols));
  m.placement.resize(graph.size());

  std::map<UnitClass, int> need, have;
  for (const auto& u : m.units) ++have[u.cls];
  for (const auto& n : graph.nodes()) {
    auto cls = unit_class_of(n.kind);
    m.placement[static_cast<std::size_t>(n.id)].cls = cls;
    if (cls == UnitClass::Lvc) m.spilled.push_back(n.id);
    if (cls != UnitClass::Injector && cls != UnitClass::Lvc) ++need[cls];
  }
  for (const auto& [cls, count] : need)
    if (count > have[cls])
      throw CapacityError(std::string(unit_class_name(cls)),
                          std::string(unit_class_name(cls)) + " needs " + std::to_string(count) + " units, grid has " +
                              std::to_string(have[cls]));

  // Topological order; cycles (through elevators) are broken at the lowest id.
  const std::size_t n = graph.size();
  std::vector<int> indeg(n, 0);
  std::vector<std::vector<NodeId>> succ(n), pred(n);
  for (const auto& e : graph.edges()) {
    ++indeg[static_cast<std::size_t>(e.dst)];
    succ[static_cast<std::size_t>(e.src)].push_back(e.dst);
    pred[static_cast<std::size_t>(e.dst)].push_back(e.src);
  }
  std::vector<bool> done(n, false);
  std::priority_queue<NodeId, std::vector<NodeId>, std::greater<>> ready;
  for (std::size_t i = 0; i < n; ++i)
    if (indeg[i] == 0) ready.push(static_cast<NodeId>(i));
  std::vector<bool> taken(m.units.size(), false);
  const std::pair<int, int> injector{-1, 0};
  const std::pair<int, int> lvc{m.rows, 0};
  std::size_t visited = 0;
  NodeId scan = 0;

  auto place = [&](NodeId id) {
    auto& p = m.placement[static_cast<std::size_t>(id)];
    if (p.cls == UnitClass::Injector) {
      std::tie(p.row, p.col) = injector;
      return;
    }
    if (p.cls == UnitClass::Lvc) {
      std::tie(p.row, p.col) = lvc;
      return;
    }
    double cr = 0, cc = 0;
    int count = 0;
    for (NodeId q : pred[static_cast<std::size_t>(id)])
      if (done[static_cast<std::size_t>(q)]) {
        cr += m.placement[static_cast<std::size_t>(q)].row;
        cc += m.placement[static_cast<std::size_t>(q)].col;
        ++count;
      }
    if (count == 0) {
      cr = injector.first;
      cc = injector.second;
    } else {
      cr /= count;
      cc /= count;
    }
    int best = -1;
    double best_d = 0;
    for (const auto& u : m.units) {
      if (u.cls != p.cls || taken[static_cast<std::size_t>(u.id)]) continue;
      double d = std::abs(u.row - cr) + std::abs(u.col - cc);
      if (best < 0 || d < best_d - 1e-9) {
        best = u.id;
        best_d = d;
      }
    }
    taken[static_cast<std::size_t>(best)] = true;
    p.unit = best;
    p.row = m.units[static_cast<std::size_t>(best)].row;
    p.col = m.units[static_cast<std::size_t>(best)].col;
  };

  while (visited < n) {
    NodeId id;
    if (!ready.empty()) {
      id = ready.top();
      ready.pop();
      if (done[static_cast<std::size_t>(id)]) continue;
    } else {
      while (done[static_cast<std::size_t>(scan)]) ++scan;
      id = scan;
    }
    place(id);
    done[static_cast<std::size_t>(id)] = true;
    ++visited;
    for (NodeId s : succ[static_cast<std::size_t>(id)])
      if (--indeg[static_cast<std::size_t>(s)] == 0 && !done[static_cast<std::size_t>(s)]) ready.push(s);
  }

  for (const auto& e : graph.edges()) {
    const auto& a = m.placement[static_cast<std::size_t>(e.src)];
    const auto& b = m.placement[static_cast<std::size_t>(e.dst)];
    m.routes.push_back(xy_route(a.row, a.col, b.row, b.col, grid.noc_hop_latency));
  }
  return m;
}

void dump(const Mapping& m, const DataflowGraph& graph, std::ostream& os) {
  os << "mapping rows=" << m.rows << " cols=" << m.cols << " units=" << m.units.size() << " nodes=" << graph.size()
     << " spilled=" << m.spilled.size() << "\n";
  for (const auto& n : graph.nodes()) {
    const auto& p = m.placement[static_cast<std::size_t>(n.id)];
    os << "place " << n.id << " " << kind_name(n.kind) << " -> " << unit_class_name(p.cls);
    if (p.unit >= 0) os << " unit=" << p.unit;
    os << " at=(" << p.row << "," << p.col << ")\n";
  }
  for (std::size_t i = 0; i < graph.edges().size(); ++i) {
    const auto& e = graph.edges()[i];
    os << "route " << e.src << "." << e.src_port << " -> " << e.dst << "." << e.dst_port
       << " hops=" << m.routes[i].hops.size() << " latency=" << m.routes[i].latency << "\n";
  }
}

}  // namespace dmt
