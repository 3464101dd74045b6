#include "dmt/graph.hpp"

#include <algorithm>
#include <map>
#include <ostream>
#include <queue>
#include <set>
#include <sstream>

#include "dmt/error.hpp"

namespace dmt {

std::string_view opcode_name(Opcode op) noexcept {
  switch (op) {
    case Opcode::Add: return "add";
    case Opcode::Sub: return "sub";
    case Opcode::Mul: return "mul";
    case Opcode::Div: return "div";
    case Opcode::Rem: return "rem";
    case Opcode::Neg: return "neg";
    case Opcode::Min: return "min";
    case Opcode::Max: return "max";
    case Opcode::Abs: return "abs";
    case Opcode::Shl: return "shl";
    case Opcode::Shr: return "shr";
    case Opcode::BitAnd: return "and";
    case Opcode::BitOr: return "or";
    case Opcode::BitXor: return "xor";
    case Opcode::BitNot: return "not";
    case Opcode::LogAnd: return "land";
    case Opcode::LogOr: return "lor";
    case Opcode::LogNot: return "lnot";
    case Opcode::Eq: return "eq";
    case Opcode::Ne: return "ne";
    case Opcode::Lt: return "lt";
    case Opcode::Le: return "le";
    case Opcode::Gt: return "gt";
    case Opcode::Ge: return "ge";
    case Opcode::Select: return "select";
    case Opcode::Mux: return "mux";
    case Opcode::Steer: return "steer";
    case Opcode::Sqrt: return "sqrt";
    case Opcode::Exp: return "exp";
    case Opcode::ToFloat: return "tofloat";
    case Opcode::ToInt: return "toint";
  }
  return "?";
}

int opcode_arity(Opcode op) noexcept {
  switch (op) {
    case Opcode::Neg:
    case Opcode::Abs:
    case Opcode::BitNot:
    case Opcode::LogNot:
    case Opcode::Sqrt:
    case Opcode::Exp:
    case Opcode::ToFloat:
    case Opcode::ToInt:
      return 1;
    case Opcode::Select:
    case Opcode::Mux:
      return 3;
    default:
      return 2;
  }
}

std::string_view role_name(ElevatorRole role) noexcept {
  switch (role) {
    case ElevatorRole::Whole: return "whole";
    case ElevatorRole::Segment: return "segment";
    case ElevatorRole::Tail: return "tail";
    case ElevatorRole::LoopTail: return "looptail";
  }
  return "?";
}

namespace {

template <class... Fs>
struct Overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
Overloaded(Fs...) -> Overloaded<Fs...>;

}  // namespace

std::string_view kind_name(const NodeKind& kind) noexcept {
  static constexpr std::string_view names[] = {"ArithOp", "FloatOp",   "LoadStore",   "ELoadStore",
                                               "Elevator", "Control",  "SplitJoin",   "ConstSource",
                                               "TidSource", "Sink"};
  return names[kind.index()];
}

int input_arity(const NodeKind& kind) noexcept {
  return std::visit(
      Overloaded{
          [](const ArithOp& k) { return opcode_arity(k.op); },
          [](const FloatOp& k) { return opcode_arity(k.op); },
          [](const Control& k) { return opcode_arity(k.op); },
          [](const LoadStore& k) { return 1 + int(k.is_store) + int(k.predicated) + int(k.ordered); },
          [](const ELoadStore& k) { return 2 + int(k.ordered); },
          [](const Elevator&) { return 1; },
          [](const SplitJoin& k) { return k.fan_in; },
          [](const ConstSource&) { return 0; },
          [](const TidSource&) { return 0; },
          [](const Sink& k) { return 2 + int(k.predicated) + int(k.ordered); },
      },
      kind);
}

int output_arity(const NodeKind& kind) noexcept {
  if (const auto* ls = std::get_if<LoadStore>(&kind)) return ls->is_store ? 1 : 2;
  if (std::holds_alternative<ELoadStore>(kind)) return 2;
  return 1;
}

int enable_port(const NodeKind& kind) noexcept {
  if (const auto* ls = std::get_if<LoadStore>(&kind)) return ls->predicated ? 1 + int(ls->is_store) : -1;
  if (std::holds_alternative<ELoadStore>(kind)) return 1;
  if (const auto* s = std::get_if<Sink>(&kind)) return s->predicated ? 2 : -1;
  return -1;
}

int order_port(const NodeKind& kind) noexcept {
  bool ordered = false;
  if (const auto* ls = std::get_if<LoadStore>(&kind)) ordered = ls->ordered;
  else if (const auto* e = std::get_if<ELoadStore>(&kind)) ordered = e->ordered;
  else if (const auto* s = std::get_if<Sink>(&kind)) ordered = s->ordered;
  return ordered ? input_arity(kind) - 1 : -1;
}

int done_port(const NodeKind& kind) noexcept {
  if (const auto* ls = std::get_if<LoadStore>(&kind)) return ls->is_store ? 0 : 1;
  if (std::holds_alternative<ELoadStore>(kind)) return 1;
  if (std::holds_alternative<Sink>(kind)) return 0;
  return -1;
}

bool is_memory(const NodeKind& kind) noexcept {
  return std::holds_alternative<LoadStore>(kind) || std::holds_alternative<ELoadStore>(kind) ||
         std::holds_alternative<Sink>(kind);
}

bool is_store(const NodeKind& kind) noexcept {
  if (const auto* ls = std::get_if<LoadStore>(&kind)) return ls->is_store;
  return std::holds_alternative<Sink>(kind);
}

std::string_view memory_array(const NodeKind& kind) noexcept {
  if (const auto* ls = std::get_if<LoadStore>(&kind)) return ls->array;
  if (const auto* e = std::get_if<ELoadStore>(&kind)) return e->array;
  if (const auto* s = std::get_if<Sink>(&kind)) return s->array;
  return {};
}

std::string describe(const NodeKind& kind) {
  std::ostringstream os;
  os << kind_name(kind);
  std::visit(Overloaded{
                 [&](const ArithOp& k) { os << " op=" << opcode_name(k.op); },
                 [&](const FloatOp& k) { os << " op=" << opcode_name(k.op); },
                 [&](const Control& k) { os << " op=" << opcode_name(k.op); },
                 [&](const LoadStore& k) {
                   os << " array=" << k.array << (k.is_store ? " store" : " load") << " offset=" << k.offset;
                   if (k.predicated) os << " predicated";
                   if (k.ordered) os << " ordered";
                 },
                 [&](const ELoadStore& k) {
                   os << " array=" << k.array << " delta=" << k.delta.to_string() << " win=" << k.window
                      << " offset=" << k.offset;
                   if (k.ordered) os << " ordered";
                 },
                 [&](const Elevator& k) {
                   os << " delta=" << k.delta.to_string() << " const=" << to_string(k.constant)
                      << " win=" << k.window << " shift=" << k.shift << " pre=" << k.pre_shift
                      << " role=" << role_name(k.role) << " comm=" << k.comm_id;
                   if (k.spilled) os << " spilled";
                 },
                 [&](const SplitJoin& k) { os << " fan_in=" << k.fan_in; },
                 [&](const ConstSource& k) {
                   os << " value=" << to_string(k.value) << (k.value.is_float() ? "f" : "");
                 },
                 [&](const TidSource& k) {
                   if (k.dim == TidSource::kLinearTid) os << " dim=linear";
                   else os << " dim=" << "xyz"[k.dim];
                 },
                 [&](const Sink& k) {
                   os << " array=" << k.array << " offset=" << k.offset;
                   if (k.predicated) os << " predicated";
                   if (k.ordered) os << " ordered";
                 },
             },
             kind);
  return os.str();
}

NodeId DataflowGraph::add_node(NodeKind kind, std::string label) {
  auto id = static_cast<NodeId>(nodes_.size());
  nodes_.push_back(Node{id, std::move(kind), std::move(label)});
  return id;
}

void DataflowGraph::connect(NodeId src, int src_port, NodeId dst, int dst_port) {
  edges_.push_back(Edge{src, src_port, dst, dst_port});
}

const ArrayDecl* DataflowGraph::find_array(std::string_view name) const noexcept {
  for (const auto& a : arrays_)
    if (a.name == name) return &a;
  return nullptr;
}

std::optional<Edge> DataflowGraph::driver(NodeId dst, int port) const {
  for (const auto& e : edges_)
    if (e.dst == dst && e.dst_port == port) return e;
  return std::nullopt;
}

std::vector<Edge> DataflowGraph::fanout(NodeId src) const {
  std::vector<Edge> out;
  for (const auto& e : edges_)
    if (e.src == src) out.push_back(e);
  return out;
}

bool ValidationReport::has(std::string_view code) const noexcept {
  return std::any_of(violations.begin(), violations.end(),
                     [&](const Violation& v) { return v.code == code; });
}

std::string ValidationReport::to_string() const {
  std::ostringstream os;
  for (const auto& v : violations) {
    os << v.code;
    if (v.node != kNoNode) os << " node=" << v.node;
    if (v.edge) os << " edge=" << *v.edge;
    os << ": " << v.message << "\n";
  }
  return os.str();
}

namespace {

void check_comm(const ThreadSpace& space, NodeId id, const TidDelta& delta, std::int64_t window,
                std::vector<Violation>& out) {
  if (window < 1 || window > space.block_size())
    out.push_back({"window range", id, std::nullopt,
                   "window " + std::to_string(window) + " outside [1," +
                       std::to_string(space.block_size()) + "]"});
  try {
    delta_to_linear(delta, space);
  } catch (const RangeError& e) {
    out.push_back({"delta range", id, std::nullopt, e.what()});
  }
}

// Memory nodes reachable from `from` through done -> SplitJoin* -> order edges.
std::set<NodeId> order_successors(const DataflowGraph& g, NodeId from,
                                  const std::vector<std::vector<std::size_t>>& out_edges) {
  std::set<NodeId> reached;
  std::set<NodeId> seen_sj;
  std::queue<std::pair<NodeId, int>> work;  // (node, output port to follow)
  work.push({from, done_port(g.node(from).kind)});
  while (!work.empty()) {
    auto [n, port] = work.front();
    work.pop();
    for (std::size_t ei : out_edges[static_cast<std::size_t>(n)]) {
      const Edge& e = g.edges()[ei];
      if (e.src_port != port) continue;
      const auto& dk = g.node(e.dst).kind;
      if (std::holds_alternative<SplitJoin>(dk)) {
        if (seen_sj.insert(e.dst).second) work.push({e.dst, 0});
      } else if (is_memory(dk) && e.dst_port == order_port(dk) && std::holds_alternative<SplitJoin>(g.node(n).kind)) {
        if (reached.insert(e.dst).second) work.push({e.dst, done_port(dk)});
      }
    }
  }
  return reached;
}

}  // namespace

ValidationReport validate(const DataflowGraph& g) {
  ValidationReport report;
  auto& out = report.violations;
  const auto n = static_cast<NodeId>(g.size());
  const auto& space = g.thread_space();

  std::vector<std::vector<int>> drivers(g.size());
  std::vector<std::vector<std::size_t>> out_edges(g.size());
  for (std::size_t i = 0; i < g.size(); ++i)
    drivers[i].assign(static_cast<std::size_t>(input_arity(g.nodes()[i].kind)), 0);

  for (std::size_t ei = 0; ei < g.edges().size(); ++ei) {
    const Edge& e = g.edges()[ei];
    if (e.src < 0 || e.src >= n || e.dst < 0 || e.dst >= n) {
      out.push_back({"bad edge", kNoNode, ei, "edge references unknown node"});
      continue;
    }
    const auto& sk = g.node(e.src).kind;
    const auto& dk = g.node(e.dst).kind;
    if (e.src_port < 0 || e.src_port >= output_arity(sk)) {
      out.push_back({"bad port", e.src, ei, "output port " + std::to_string(e.src_port) + " out of range"});
      continue;
    }
    if (e.dst_port < 0 || e.dst_port >= input_arity(dk)) {
      bool elev = std::holds_alternative<Elevator>(dk);
      out.push_back({elev ? "elevator arity" : "bad port", e.dst, ei,
                     elev ? "elevator is single-input" : "input port " + std::to_string(e.dst_port) + " out of range"});
      continue;
    }
    out_edges[static_cast<std::size_t>(e.src)].push_back(ei);
    drivers[static_cast<std::size_t>(e.dst)][static_cast<std::size_t>(e.dst_port)]++;
  }

  for (const auto& node : g.nodes()) {
    const auto& d = drivers[static_cast<std::size_t>(node.id)];
    for (std::size_t p = 0; p < d.size(); ++p) {
      if (d[p] == 0)
        out.push_back({"dangling port", node.id, std::nullopt, "input port " + std::to_string(p) + " unconnected"});
      else if (d[p] > 1)
        out.push_back({std::holds_alternative<Elevator>(node.kind) ? "elevator arity" : "multiple drivers",
                       node.id, std::nullopt, "input port " + std::to_string(p) + " has " + std::to_string(d[p]) + " drivers"});
    }
    if (const auto* el = std::get_if<Elevator>(&node.kind)) {
      check_comm(space, node.id, el->delta, el->window, out);
    } else if (const auto* ld = std::get_if<ELoadStore>(&node.kind)) {
      check_comm(space, node.id, ld->delta, ld->window, out);
    } else if (const auto* sj = std::get_if<SplitJoin>(&node.kind)) {
      if (sj->fan_in < 1) out.push_back({"splitjoin arity", node.id, std::nullopt, "fan_in < 1"});
    } else if (const auto* ts = std::get_if<TidSource>(&node.kind)) {
      if (ts->dim != TidSource::kLinearTid && (ts->dim < 0 || ts->dim >= space.dims()))
        out.push_back({"tid dimension", node.id, std::nullopt, "dimension " + std::to_string(ts->dim)});
    }
    if (is_memory(node.kind) && !g.find_array(memory_array(node.kind)))
      out.push_back({"unknown array", node.id, std::nullopt, std::string(memory_array(node.kind))});
  }
  if (!out.empty()) return report;

  // Intra-thread memory order.
  std::map<std::string_view, std::vector<NodeId>> by_array;
  for (const auto& node : g.nodes())
    if (is_memory(node.kind)) by_array[memory_array(node.kind)].push_back(node.id);
  for (const auto& [array, ops] : by_array) {
    std::vector<std::set<NodeId>> reach;
    for (NodeId op : ops) reach.push_back(order_successors(g, op, out_edges));
    for (std::size_t a = 0; a < ops.size(); ++a)
      for (std::size_t b = a + 1; b < ops.size(); ++b) {
        if (!is_store(g.node(ops[a]).kind) && !is_store(g.node(ops[b]).kind)) continue;
        if (reach[a].count(ops[b]) || reach[b].count(ops[a])) continue;
        out.push_back({"memory order", ops[b], std::nullopt,
                       "nodes " + std::to_string(ops[a]) + " and " + std::to_string(ops[b]) + " on array " +
                           std::string(array) + " are not ordered by a SplitJoin chain"});
      }
  }

  // Cycles must pass through a tag-changing elevator.
  std::vector<int> indeg(g.size(), 0);
  auto skip = [&](NodeId id) { return std::holds_alternative<Elevator>(g.node(id).kind); };
  for (const auto& e : g.edges())
    if (!skip(e.src) && !skip(e.dst)) indeg[static_cast<std::size_t>(e.dst)]++;
  std::queue<NodeId> ready;
  std::size_t visited = 0;
  for (NodeId id = 0; id < n; ++id)
    if (skip(id) || indeg[static_cast<std::size_t>(id)] == 0) ready.push(id);
  while (!ready.empty()) {
    NodeId id = ready.front();
    ready.pop();
    ++visited;
    if (skip(id)) continue;
    for (std::size_t ei : out_edges[static_cast<std::size_t>(id)]) {
      NodeId d = g.edges()[ei].dst;
      if (skip(d)) continue;
      if (--indeg[static_cast<std::size_t>(d)] == 0) ready.push(d);
    }
  }
  if (visited != g.size())
    out.push_back({"combinational cycle", kNoNode, std::nullopt, "cycle without an elevator node"});
  return report;
}

void dump(const DataflowGraph& g, std::ostream& os) {
  os << "graph space=" << g.thread_space().to_string() << " nodes=" << g.size()
     << " edges=" << g.edges().size() << "\n";
  for (const auto& a : g.arrays())
    os << "array " << (a.type == ScalarKind::Int ? "int" : "float") << " " << a.name << "[" << a.extent << "]\n";
  for (const auto& node : g.nodes()) {
    os << "node " << node.id << " " << describe(node.kind);
    if (!node.label.empty()) os << " label=" << node.label;
    os << "\n";
  }
  for (const auto& e : g.edges())
    os << "edge " << e.src << "." << e.src_port << " -> " << e.dst << "." << e.dst_port << "\n";
}

std::string dump(const DataflowGraph& g) {
  std::ostringstream os;
  dump(g, os);
  return os.str();
}

void to_dot(const DataflowGraph& g, std::ostream& os) {
  os << "digraph dfg {\n  node [shape=box, fontname=\"monospace\"];\n";
  for (const auto& node : g.nodes()) {
    os << "  n" << node.id << " [label=\"" << node.id << ": " << describe(node.kind);
    if (!node.label.empty()) os << "\\n" << node.label;
    os << "\"";
    if (std::holds_alternative<Elevator>(node.kind) || std::holds_alternative<ELoadStore>(node.kind))
      os << ", style=filled, fillcolor=lightblue";
    os << "];\n";
  }
  for (const auto& e : g.edges()) {
    os << "  n" << e.src << " -> n" << e.dst << " [taillabel=\"" << e.src_port << "\", headlabel=\""
       << e.dst_port << "\"";
    if (std::holds_alternative<Elevator>(g.node(e.src).kind)) os << ", style=dashed";
    os << "];\n";
  }
  os << "}\n";
}

}  // namespace dmt
