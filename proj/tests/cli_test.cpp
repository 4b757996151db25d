#include <gtest/gtest.h>

#include <unistd.h>

#include "arrac/arrac.hpp"
#include "support/process.hpp"

using namespace arrac;
namespace fs = std::filesystem;
using oracle::runCli;

namespace {

Value s(const char* x) { return Value::string(x); }

Array matrixM() {
  return makeArray(2, {{Index{0, 0}, s("a")}, {Index{0, 1}, s("b")}, {Index{1, 0}, s("c")},
                       {Index{1, 1}, s("d")}});
}

class Cli : public ::testing::Test {
 protected:
  Cli() : scratch_("cli") {
    db_ = scratch_.path() / "db";
    fs::create_directories(db_);
    saveArray(matrixM(), db_ / "M.arr");
    saveArray(makeArray(1, {{Index{0}, Value::tuple({s("x"), Value::integer(1)})},
                            {Index{1}, Value::tuple({s("y"), Value::integer(2)})}}),
              db_ / "T.arr");
  }

  oracle::RunResult run(std::vector<std::string> args) { return runCli(args, scratch_.path()); }
  std::string db() const { return db_.string(); }

  oracle::ScratchDir scratch_;
  fs::path db_;
};

}  // namespace

TEST_F(Cli, QuerySelect) {
  auto r = run({"query", "-c", db(), "select(M, val = \"b\")"});
  EXPECT_EQ(r.exitCode, 0) << r.err;
  EXPECT_EQ(r.out, "arrac v1 arity=2 count=1\n0,1 -> str:\"b\"\n");
  EXPECT_TRUE(r.err.empty());
}

TEST_F(Cli, QueryBareNameEchoesCanonicalFile) {
  auto r = run({"query", "--catalog", db(), "--format", "canonical", "M"});
  EXPECT_EQ(r.exitCode, 0);
  EXPECT_EQ(r.out, oracle::slurp(db_ / "M.arr"));
}

TEST_F(Cli, QueryFromFileToOutput) {
  writeTextFile(scratch_.path() / "q.aq", "# transpose\ntransform(M, [permute(1,0)])\n");
  fs::path out = scratch_.path() / "out.arr";
  auto r = run({"query", "-c", db(), "-f", (scratch_.path() / "q.aq").string(), "-o", out.string()});
  EXPECT_EQ(r.exitCode, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  EXPECT_EQ(loadArray(out).array, transform(matrixM(), {Permute{{1, 0}}}));
}

TEST_F(Cli, ExitCodesAndDiagnostics) {
  auto parse = run({"query", "-c", db(), "cross(M,"});
  EXPECT_EQ(parse.exitCode, 2);
  EXPECT_TRUE(parse.out.empty());
  EXPECT_NE(parse.err.find("ParseError"), std::string::npos);
  EXPECT_NE(parse.err.find("        ^"), std::string::npos);

  auto unbound = run({"query", "-c", db(), "union(M, Q)"});
  EXPECT_EQ(unbound.exitCode, 3);
  EXPECT_NE(unbound.err.find("UnboundName"), std::string::npos);

  auto arity = run({"query", "-c", db(), "union(M, T)"});
  EXPECT_EQ(arity.exitCode, 3);

  auto runtime = run({"query", "-c", db(), "union(M, transform(M, [translate(1,1)]))"});
  EXPECT_EQ(runtime.exitCode, 4);
  EXPECT_NE(runtime.err.find("ConsistencyViolation"), std::string::npos);
  EXPECT_NE(runtime.err.find("at index (0,1)"), std::string::npos);
  EXPECT_TRUE(runtime.out.empty());

  writeTextFile(db_ / "Bad.arr", "arrac v1 arity=1 count=1\n0 -> wat\n");
  auto format = run({"query", "-c", db(), "M"});
  EXPECT_EQ(format.exitCode, 5);
  fs::remove(db_ / "Bad.arr");

  EXPECT_EQ(run({"query", "-c", db()}).exitCode, 1);
  EXPECT_EQ(run({"frobnicate"}).exitCode, 1);
  EXPECT_EQ(run({"query", "-c", (scratch_.path() / "nope").string(), "M"}).exitCode, 1);
}

TEST_F(Cli, LoadAndSave) {
  fs::path src = scratch_.path() / "incoming.arr";
  writeTextFile(src, "arrac v1 arity=1 count=2\r\n1 -> int:5\r\n0 -> int:4\r\n");
  auto r = run({"load", "-c", db(), src.string(), "--name", "N"});
  EXPECT_EQ(r.exitCode, 0) << r.err;
  EXPECT_EQ(oracle::slurp(db_ / "N.arr"), "arrac v1 arity=1 count=2\n0 -> int:4\n1 -> int:5\n");

  auto saved = run({"save", "-c", db(), "N"});
  EXPECT_EQ(saved.exitCode, 0);
  EXPECT_EQ(saved.out, oracle::slurp(db_ / "N.arr"));

  writeTextFile(src, "arrac v1 arity=1 count=2\n0 -> int:1\n0 -> int:2\n");
  auto conflict = run({"load", "-c", db(), src.string()});
  EXPECT_EQ(conflict.exitCode, 4);
  EXPECT_NE(conflict.err.find("ConsistencyViolation"), std::string::npos);
}

TEST_F(Cli, VerticalPartitionRoundTrip) {
  auto p = run({"vpartition", "-c", db(), "M", "--pred", "dim0 = 0", "--pred", "dim0 = 1",
                "--shards", "2"});
  ASSERT_EQ(p.exitCode, 0) << p.err;
  fs::path dir = db_ / "M.placement";
  EXPECT_TRUE(fs::exists(dir / "manifest.json"));
  EXPECT_TRUE(fs::exists(dir / "M.frag0.arr"));
  EXPECT_TRUE(fs::exists(dir / "M.frag1.arr"));

  auto back = run({"reassemble", "-c", db(), (dir / "manifest.json").string(), "--verify"});
  EXPECT_EQ(back.exitCode, 0) << back.err;
  EXPECT_EQ(parseArrayFile(back.out).array, matrixM());
}

TEST_F(Cli, SingleFragmentScheme) {
  fs::path dir = scratch_.path() / "one";
  auto p = run({"vpartition", "-c", db(), "M", "-p", "true", "-o", dir.string()});
  ASSERT_EQ(p.exitCode, 0) << p.err;
  PlacementManifest m = manifestFromJson(readTextFile(dir / "manifest.json"));
  EXPECT_EQ(m.fragments.size(), 1u);
  EXPECT_EQ(parseArrayFile(run({"reassemble", dir.string()}).out).array, matrixM());
}

TEST_F(Cli, BadSchemeMapsToRuntimeExit) {
  auto p = run({"vpartition", "-c", db(), "M", "-p", "dim0 = 0"});
  EXPECT_EQ(p.exitCode, 4);
  EXPECT_NE(p.err.find("NotExhaustive"), std::string::npos);
  auto h = run({"hpartition", "-c", db(), "M", "-s", "0"});
  EXPECT_EQ(h.exitCode, 4);
  EXPECT_NE(h.err.find("NotTupleValued"), std::string::npos);
}

TEST_F(Cli, TamperedFragments) {
  ASSERT_EQ(run({"vpartition", "-c", db(), "M", "-p", "dim0 = 0", "-p", "dim0 = 1"}).exitCode, 0);
  fs::path dir = db_ / "M.placement";

  // Edited value, no overlap: reassembly accepts it, --verify catches it.
  writeTextFile(dir / "M.frag1.arr",
                "arrac v1 arity=2 count=2\n1,0 -> str:\"c\"\n1,1 -> str:\"EDITED\"\n");
  auto plain = run({"reassemble", dir.string()});
  EXPECT_EQ(plain.exitCode, 0);
  EXPECT_EQ(lookup(parseArrayFile(plain.out).array, Index{1, 1}), s("EDITED"));
  auto verified = run({"reassemble", "-c", db(), dir.string(), "--verify"});
  EXPECT_EQ(verified.exitCode, 4);

  // Conflicting overlap between fragments: ConsistencyViolation.
  writeTextFile(dir / "M.frag1.arr",
                "arrac v1 arity=2 count=2\n0,0 -> str:\"Z\"\n1,0 -> str:\"c\"\n");
  auto conflict = run({"reassemble", dir.string()});
  EXPECT_EQ(conflict.exitCode, 4);
  EXPECT_NE(conflict.err.find("ConsistencyViolation"), std::string::npos);
}

TEST_F(Cli, HorizontalPartitionRoundTrip) {
  auto p = run({"hpartition", "-c", db(), "T", "--slice", "1", "--slice", "0"});
  ASSERT_EQ(p.exitCode, 0) << p.err;
  fs::path dir = db_ / "T.placement";
  auto back = run({"reassemble", "-c", db(), dir.string(), "--verify"});
  EXPECT_EQ(back.exitCode, 0) << back.err;
  EXPECT_EQ(back.out, oracle::slurp(db_ / "T.arr"));
}

TEST_F(Cli, TableRoundTrip) {
  fs::path csv = scratch_.path() / "R.csv";
  std::string table =
      "*measurementID:int,time:int,detector:str,valueMatrix:matrix\n"
      "11,1005,d2,\"array{arity=2; 0,0 -> float:0.5}\"\n"
      "10,1000,d1,\"array{arity=2; 0,0 -> int:1; 1,1 -> int:2}\"\n";
  writeTextFile(csv, table);
  auto enc = run({"encode-table", "-c", db(), csv.string()});
  ASSERT_EQ(enc.exitCode, 0) << enc.err;
  ArrayFile f = loadArray(db_ / "R.arr");
  EXPECT_EQ(f.labels.coordOf(1, "valueMatrix"), 3);
  EXPECT_TRUE(lookup(f.array, Index{10, 3})->isArray());

  auto dec = run({"decode-table", "-c", db(), "R"});
  ASSERT_EQ(dec.exitCode, 0) << dec.err;
  // Rows come back in key order.
  EXPECT_EQ(dec.out,
            "*measurementID:int,time:int,detector:str,valueMatrix:matrix\n"
            "10,1000,d1,\"array{arity=2; 0,0 -> int:1; 1,1 -> int:2}\"\n"
            "11,1005,d2,\"array{arity=2; 0,0 -> float:0.5}\"\n");

  writeTextFile(csv, "*id:int,x\n1,a\n1,b\n");
  auto dup = run({"encode-table", "-c", db(), csv.string(), "-n", "D"});
  EXPECT_EQ(dup.exitCode, 4);
  EXPECT_NE(dup.err.find("DuplicateKey"), std::string::npos);
}
