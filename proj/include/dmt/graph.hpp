#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "dmt/scalar.hpp"
#include "dmt/thread_space.hpp"

namespace dmt {

using NodeId = std::int32_t;
inline constexpr NodeId kNoNode = -1;

enum class Opcode : std::uint8_t {
  Add, Sub, Mul, Div, Rem, Neg, Min, Max, Abs,
  Shl, Shr, BitAnd, BitOr, BitXor, BitNot,
  LogAnd, LogOr, LogNot,
  Eq, Ne, Lt, Le, Gt, Ge,
  Select,  // (cond, a, b), strict
  Mux,     // (sel, a, b), waits only for the selected operand
  Steer,   // (sel, v): passes v when sel is false, discards it otherwise
  Sqrt, Exp, ToFloat, ToInt,
};

std::string_view opcode_name(Opcode op) noexcept;
int opcode_arity(Opcode op) noexcept;

/// Integer ALU operation.
struct ArithOp {
  Opcode op;
};
/// Floating point (or int<->float conversion) operation.
struct FloatOp {
  Opcode op;
};
/// Select, compare, bitwise and logical operations.
struct Control {
  Opcode op;
};

/// Plain load or store. Ports: index, [value], [enable], [order].
/// A disabled predicated load emits a zero token without touching memory.
struct LoadStore {
  std::string array;
  bool is_store = false;
  std::int64_t offset = 0;
  bool predicated = false;
  bool ordered = false;
};

/// Load with predicated bypass: enabled threads load, the rest receive the
/// value forwarded by the thread `delta` behind them. Ports: index, enable, [order].
struct ELoadStore {
  std::string array;
  TidDelta delta;  // forward shift: loader tid -> consumer tid
  std::int64_t window = 0;
  std::int64_t offset = 0;
  bool ordered = false;
};

enum class ElevatorRole : std::uint8_t {
  Whole,     // single node with constant and window logic
  Segment,   // leading cascade stage: linear retag only
  Tail,      // last cascade stage: window logic and constant injection
  LoopTail,  // last stage of a forwarding loop: window logic, no constant
};

std::string_view role_name(ElevatorRole role) noexcept;

/// Retags tid -> tid + shift. `delta` is the full communication shift of the
/// operation this node belongs to; cascaded stages carry a partial `shift`.
struct Elevator {
  TidDelta delta;
  Scalar constant;
  std::int64_t window = 0;
  std::int64_t shift = 0;      // this stage's linear shift
  std::int64_t pre_shift = 0;  // sum of shifts of the stages before this one
  ElevatorRole role = ElevatorRole::Whole;
  bool spilled = false;        // routed through the Live Value Cache
  std::int32_t comm_id = -1;   // groups the stages of one communication
};

/// Joins `fan_in` ordering tokens into one; fan_in == 1 acts as a split.
struct SplitJoin {
  int fan_in = 1;
};

struct ConstSource {
  Scalar value;
};

/// Injected thread coordinate. dim 0..2 selects threadIdx.{x,y,z}; kLinearTid the linear id.
struct TidSource {
  static constexpr int kLinearTid = 3;
  int dim = kLinearTid;
};

/// Terminal store; a thread commits when it fires. Ports: index, value, [enable], [order].
struct Sink {
  std::string array;
  std::int64_t offset = 0;
  bool predicated = false;
  bool ordered = false;
};

using NodeKind = std::variant<ArithOp, FloatOp, LoadStore, ELoadStore, Elevator, Control,
                              SplitJoin, ConstSource, TidSource, Sink>;

std::string_view kind_name(const NodeKind& kind) noexcept;
int input_arity(const NodeKind& kind) noexcept;
int output_arity(const NodeKind& kind) noexcept;
/// Port index of the enable / order input, or -1.
int enable_port(const NodeKind& kind) noexcept;
int order_port(const NodeKind& kind) noexcept;
/// Output port carrying the memory-completion token, or -1.
int done_port(const NodeKind& kind) noexcept;
bool is_memory(const NodeKind& kind) noexcept;
/// Memory node that writes its array.
bool is_store(const NodeKind& kind) noexcept;
/// Array touched by a memory node, empty otherwise.
std::string_view memory_array(const NodeKind& kind) noexcept;

struct Node {
  NodeId id = kNoNode;
  NodeKind kind;
  std::string label;
};

struct Edge {
  NodeId src = kNoNode;
  int src_port = 0;
  NodeId dst = kNoNode;
  int dst_port = 0;
  friend bool operator==(const Edge&, const Edge&) = default;
};

struct ArrayDecl {
  std::string name;
  ScalarKind type = ScalarKind::Int;
  std::int64_t extent = 0;
};

class DataflowGraph {
 public:
  DataflowGraph() = default;
  explicit DataflowGraph(ThreadSpace space) : space_(space) {}

  const ThreadSpace& thread_space() const noexcept { return space_; }
  void set_thread_space(ThreadSpace s) { space_ = s; }

  NodeId add_node(NodeKind kind, std::string label = {});
  void connect(NodeId src, int src_port, NodeId dst, int dst_port);
  void add_array(ArrayDecl decl) { arrays_.push_back(std::move(decl)); }

  const std::vector<Node>& nodes() const noexcept { return nodes_; }
  std::vector<Node>& nodes() noexcept { return nodes_; }
  const Node& node(NodeId id) const { return nodes_.at(static_cast<std::size_t>(id)); }
  Node& node(NodeId id) { return nodes_.at(static_cast<std::size_t>(id)); }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  std::vector<Edge>& edges() noexcept { return edges_; }
  const std::vector<ArrayDecl>& arrays() const noexcept { return arrays_; }
  const ArrayDecl* find_array(std::string_view name) const noexcept;

  std::size_t size() const noexcept { return nodes_.size(); }
  bool empty() const noexcept { return nodes_.empty(); }

  /// Edge feeding (dst, port), if any.
  std::optional<Edge> driver(NodeId dst, int port) const;
  /// Edges leaving `src` (all ports), in insertion order.
  std::vector<Edge> fanout(NodeId src) const;

  template <class T>
  std::size_t count_kind() const {
    std::size_t n = 0;
    for (const auto& node : nodes_) n += std::holds_alternative<T>(node.kind) ? 1 : 0;
    return n;
  }

 private:
  ThreadSpace space_;
  std::vector<Node> nodes_;
  std::vector<Edge> edges_;
  std::vector<ArrayDecl> arrays_;
};

struct Violation {
  std::string code;  // e.g. "dangling port", "elevator arity"
  NodeId node = kNoNode;
  std::optional<std::size_t> edge;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const noexcept { return violations.empty(); }
  bool has(std::string_view code) const noexcept;
  std::string to_string() const;
};

/// Checks structural well-formedness: port wiring, elevator arity, window and
/// delta ranges, declared arrays, memory ordering through SplitJoin chains and
/// absence of cycles that do not pass through a tag-changing node.
ValidationReport validate(const DataflowGraph& graph);

/// Deterministic textual listing: one line per node, then one per edge.
void dump(const DataflowGraph& graph, std::ostream& os);
std::string dump(const DataflowGraph& graph);
/// Graphviz export.
void to_dot(const DataflowGraph& graph, std::ostream& os);

std::string describe(const NodeKind& kind);

}  // namespace dmt
