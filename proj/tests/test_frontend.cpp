#include <doctest.h>

#include "dmt/error.hpp"
#include "dmt/frontend.hpp"
#include "dmt/kernels_embed.hpp"

using namespace dmt;

namespace {

const std::string& src(const std::string& name) { return embedded::kernels().at(name); }

std::size_t count_op(const DataflowGraph& g, Opcode op) {
  std::size_t n = 0;
  for (const auto& node : g.nodes()) {
    if (auto* a = std::get_if<ArithOp>(&node.kind)) n += a->op == op;
    if (auto* f = std::get_if<FloatOp>(&node.kind)) n += f->op == op;
  }
  return n;
}

std::string lower_error(const std::string& text, ThreadSpace space = ThreadSpace{16}) {
  try {
    lower(parse(text), space);
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

std::string parse_error(const std::string& text) {
  try {
    parse(text);
  } catch (const ParseError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("convolution lowers to the expected node mix") {
  auto g = lower(parse(src("conv1d")), ThreadSpace{256});
  CHECK(g.count_kind<LoadStore>() == 1);
  CHECK(g.count_kind<Elevator>() == 2);
  CHECK(g.count_kind<Sink>() == 1);
  CHECK(count_op(g, Opcode::Mul) == 3);
  CHECK(count_op(g, Opcode::Add) == 2);
  std::vector<std::int64_t> shifts;
  for (const auto& n : g.nodes())
    if (auto* e = std::get_if<Elevator>(&n.kind)) {
      shifts.push_back(e->shift);
      CHECK(e->constant == Scalar::of_int(0));
      CHECK(e->window == 256);
    }
  CHECK(shifts == std::vector<std::int64_t>{1, -1});
  CHECK(validate(g).ok());
}

TEST_CASE("every bundled kernel lowers to a valid graph") {
  for (const auto& [name, text] : embedded::kernels()) {
    CAPTURE(name);
    ThreadSpace space = name.rfind("matmul", 0) == 0 ? ThreadSpace{8, 8} : ThreadSpace{name == "window" || name == "eldst_reuse" ? 12 : 128};
    auto g = lower(parse(text), space);
    auto r = validate(g);
    CHECK_MESSAGE(r.ok(), r.to_string());
  }
}

TEST_CASE("AST counts match graph communication nodes") {
  auto k = parse(src("matmul"));
  auto c = ast::count(k);
  CHECK(c.from_thread_or_mem == 2);
  CHECK(c.stores == 1);
  auto g = lower(k, ThreadSpace{8, 8});
  CHECK(g.count_kind<ELoadStore>() == 16);  // unrolled K = 8
  auto c2 = ast::count(parse(src("reduce")));
  CHECK(c2.from_thread_or_const == 7);
  CHECK(c2.tag_values == 7);
}

TEST_CASE("matmul forwards A along x and B along y") {
  auto g = lower(parse(src("matmul")), ThreadSpace{8, 8});
  int a = 0, b = 0;
  for (const auto& n : g.nodes())
    if (auto* e = std::get_if<ELoadStore>(&n.kind)) {
      if (e->array == "A") {
        CHECK(e->delta == TidDelta{{1, 0, 0}, 2});
        ++a;
      } else {
        CHECK(e->delta == TidDelta{{0, 1, 0}, 2});
        ++b;
      }
    }
  CHECK(a == 8);
  CHECK(b == 8);
}

TEST_CASE("defines override kernel constants") {
  auto g = lower(parse(src("matmul")), ThreadSpace{4, 4}, {{"K", Scalar::of_int(3)}});
  CHECK(g.count_kind<ELoadStore>() == 6);
  CHECK(g.find_array("A")->extent == 12);
  CHECK_THROWS_AS(lower(parse(src("matmul")), ThreadSpace{4, 4}, {{"Q", Scalar::of_int(3)}}), LowerError);
}

TEST_CASE("lowering errors") {
  CHECK(lower_error("kernel k { global int a[16]; int v = a[tid]; a[tid] = fromThreadOrConst<v,-1,0>(); }")
            .find("missing tagValue for communicated variable 'v'") != std::string::npos);
  CHECK(lower_error("kernel k { global int a[16]; int v = a[tid]; tagValue<v>(); v = v + 1; tagValue<v>();"
                    " a[tid] = fromThreadOrConst<v,-1,0>(); }")
            .find("multiple reaching definitions") != std::string::npos);
  CHECK(lower_error("kernel k { global int a[16]; int v = a[tid]; if (tid > 2) { tagValue<v>(); }"
                    " a[tid] = fromThreadOrConst<v,-1,0>(); }")
            .find("tagValue inside a divergent branch") != std::string::npos);
  CHECK(lower_error("kernel k { global int a[16]; int v = a[tid]; tagValue<v>();"
                    " if (tid > 2) { a[tid] = fromThreadOrConst<v,-1,0>(); } }")
            .find("communication inside a divergent branch") != std::string::npos);
  CHECK(lower_error("kernel k { global int a[16]; int v = a[tid]; tagValue<v>();"
                    " a[tid] = fromThreadOrConst<v,-16,0>(); }")
            .find("range error") != std::string::npos);
  CHECK(lower_error("kernel k { global float a[16]; a[tid] = a[tid] & 1; }").find("bitwise operator on float") !=
        std::string::npos);
}

TEST_CASE("parse errors carry positions") {
  CHECK(parse_error("kernel k { global int a[4]; b[0] = 1; }").find("1:29: undeclared array 'b'") == 0);
  CHECK(parse_error("kernel k { global int a[4]; a[0] = q; }").find("undeclared variable 'q'") != std::string::npos);
  CHECK(parse_error("kernel k { global int a[4]; for (int i = 0; i < a[0]; i++) {} }")
            .find("non-constant loop bound") != std::string::npos);
  CHECK(parse_error("kernel k { global int a[4] }").find("syntax error") != std::string::npos);
  try {
    parse_file("/nonexistent/x.dmt");
    FAIL("no throw");
  } catch (const Error& e) {
    CHECK(e.stage() == Stage::Frontend);
    CHECK(std::string(e.what()).find("file not found") == 0);
  }
}

TEST_CASE("interpreter: naive convolution oracle") {
  MemoryImage mem;
  mem["image"] = {Scalar::of_int(1), Scalar::of_int(2), Scalar::of_int(3)};
  Defines ones{{"W0", Scalar::of_int(1)}, {"W1", Scalar::of_int(1)}, {"W2", Scalar::of_int(1)}};
  interpret(parse(src("conv1d_naive")), ThreadSpace{3}, mem, ones);
  CHECK(mem["result"] == std::vector<Scalar>{Scalar::of_int(3), Scalar::of_int(6), Scalar::of_int(5)});
}

TEST_CASE("interpreter semantics") {
  const char* k = R"(kernel k {
    global int o[8];
    global float f[8];
    int x = tid / 0;
    int y = 0;
    for (int i = 3; i > 0; i--) y += i;
    if (tid % 2 == 0) { x = 5; } else { x = -5; }
    o[tid] = x + y + (tid < 4 ? 100 : 200);
    f[tid] = sqrt(float(tid)) + min(1, 2.5);
  })";
  MemoryImage mem;
  interpret(parse(k), ThreadSpace{8}, mem);
  CHECK(mem["o"][0] == Scalar::of_int(111));
  CHECK(mem["o"][7] == Scalar::of_int(201));
  CHECK(mem["f"][4] == Scalar::of_float(3.0));
  CHECK_THROWS_AS(interpret(parse(src("prefix_sum")), ThreadSpace{8}, mem), LowerError);
}
