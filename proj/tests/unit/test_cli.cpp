#include <gtest/gtest.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <fmt/format.h>
#include <unistd.h>

#include "oracles.hpp"
#include "qpfs/cli.hpp"
#include "qpfs/infotheory.hpp"

namespace fs = std::filesystem;
using namespace qpfs;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run qpfs_run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void spit(const fs::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    static std::atomic<int> counter{0};
    dir_ = fs::temp_directory_path() /
           ("qpfs_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  fs::path dir_;

  std::vector<std::string> german_args(const std::string& cmd, const std::string& out) const {
    return {cmd, "--data", oracle::data_path("german.data"), "--schema",
            oracle::data_path("german.schema"), "--out-dir", (dir_ / out).string()};
  }
};

// A is the best single predictor but nearly duplicated by B; C is weaker and
// independent of both. At alpha = 1 the argmax is A; at alpha = 0 the weight
// moves to the feature with the least redundancy (entropy diagonal, where
// every row of Q starts from H = 1 bit).
std::string redundancy_synthetic() {
  std::mt19937_64 gen(42);
  std::bernoulli_distribution coin(0.5), flip_a(0.1), flip_b(0.12), flip_c(0.3);
  std::string csv;
  for (int i = 0; i < 600; ++i) {
    const int y = coin(gen);
    const int a = flip_a(gen) ? 1 - y : y;
    const int b = flip_b(gen) ? 1 - a : a;
    const int c = flip_c(gen) ? 1 - y : y;
    csv += fmt::format("{},{},{},{}\n", a ? "p" : "q", b ? "p" : "q", c ? "p" : "q", y);
  }
  return csv;
}

}  // namespace

TEST_F(Cli, NoArgumentsIsConfigError) {
  EXPECT_EQ(qpfs_run({}).code, cli::kConfigError);
  EXPECT_EQ(qpfs_run({"select", "--bogus"}).code, cli::kConfigError);
  EXPECT_EQ(qpfs_run({"--help"}).code, cli::kOk);
}

TEST_F(Cli, SelectQuadraticOnGerman) {
  auto args = german_args("select", "s");
  args.insert(args.end(), {"--method", "quadratic", "--k", "7"});
  const auto r = qpfs_run(args);
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  EXPECT_NE(r.out.find("alpha"), std::string::npos);
  const auto sel = slurp(dir_ / "s" / "selection.tsv");
  EXPECT_EQ(std::count(sel.begin(), sel.end(), '\n'), 2 + 7);
  EXPECT_TRUE(fs::exists(dir_ / "s" / "weights.tsv"));
}

TEST_F(Cli, MaxRelFindsTargetCopy) {
  const auto schema = dir_ / "t.schema";
  spit(schema, "a categorical feature\nb categorical feature\nc continuous feature\nd binary feature\ny binary target\n");
  std::string csv;
  std::mt19937_64 gen(1);
  std::uniform_int_distribution<int> u(0, 3);
  for (int i = 0; i < 80; ++i) {
    const int y = i % 2;
    csv += fmt::format("{},{},{},{},{}\n", u(gen), u(gen), u(gen) * 1.5, y, y);
  }
  spit(dir_ / "t.csv", csv);
  const auto r = qpfs_run({"select", "--data", (dir_ / "t.csv").string(), "--schema", schema.string(),
                           "--method", "maxrel", "--k", "1", "--out-dir", (dir_ / "o").string()});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  EXPECT_NE(slurp(dir_ / "o" / "selection.tsv").find("\nd\t"), std::string::npos);
}

TEST_F(Cli, AlphaEndpointsRankDifferently) {
  spit(dir_ / "r.schema", "A categorical feature\nB categorical feature\nC categorical feature\ny binary target\n");
  spit(dir_ / "r.csv", redundancy_synthetic());
  auto top = [&](const std::string& alpha) {
    const auto out = dir_ / ("a" + alpha);
    const auto r = qpfs_run({"select", "--data", (dir_ / "r.csv").string(), "--schema",
                             (dir_ / "r.schema").string(), "--method", "quadratic", "--k", "1",
                             "--alpha", alpha, "--q-diagonal", "entropy", "--out-dir", out.string()});
    EXPECT_EQ(r.code, cli::kOk) << r.err;
    const auto sel = slurp(out / "selection.tsv");
    const auto line = sel.find("rank\n") + 5;
    return sel.substr(line, sel.find('\t', line) - line);
  };
  EXPECT_EQ(top("1"), "A");
  EXPECT_EQ(top("0"), "C");
}

TEST_F(Cli, EvaluateIsDeterministic) {
  auto a = german_args("evaluate", "e1");
  auto b = german_args("evaluate", "e2");
  for (auto* v : {&a, &b}) v->insert(v->end(), {"--method", "quadratic", "--seed", "5"});
  const auto ra = qpfs_run(a), rb = qpfs_run(b);
  ASSERT_EQ(ra.code, cli::kOk) << ra.err;
  ASSERT_EQ(rb.code, cli::kOk);
  const auto ea = slurp(dir_ / "e1" / "evaluation.tsv");
  EXPECT_FALSE(ea.empty());
  EXPECT_EQ(ea, slurp(dir_ / "e2" / "evaluation.tsv"));
  EXPECT_NE(ra.out.find("type2_error"), std::string::npos);
}

TEST_F(Cli, MissingDatasetNamesThePath) {
  const auto r = qpfs_run({"evaluate", "--data", "/no/such/german.data", "--schema",
                           oracle::data_path("german.schema")});
  EXPECT_EQ(r.code, cli::kDataError);
  EXPECT_NE(r.err.find("/no/such/german.data"), std::string::npos);
}

TEST_F(Cli, ExitCodesAreDistinct) {
  auto bad_alpha = german_args("select", "x");
  bad_alpha.insert(bad_alpha.end(), {"--alpha", "1.5"});
  EXPECT_EQ(qpfs_run(bad_alpha).code, cli::kConfigError);

  auto bad_k = german_args("select", "x");
  bad_k.insert(bad_k.end(), {"--k", "21"});
  EXPECT_EQ(qpfs_run(bad_k).code, cli::kConfigError);

  spit(dir_ / "short.csv", "1,2\n");
  const auto data = qpfs_run({"select", "--data", (dir_ / "short.csv").string(), "--schema",
                              oracle::data_path("german.schema")});
  EXPECT_EQ(data.code, cli::kDataError);

  // All-zero information: the only feature is constant, so alpha cannot be estimated.
  spit(dir_ / "z.schema", "a categorical feature\ny binary target\n");
  spit(dir_ / "z.csv", "u,0\nu,1\nu,0\nu,1\n");
  EXPECT_EQ(qpfs_run({"select", "--data", (dir_ / "z.csv").string(), "--schema",
                      (dir_ / "z.schema").string(), "--k", "1", "--out-dir", (dir_ / "z").string()})
                .code,
            cli::kDataError);
}

TEST_F(Cli, ConfigFileFlagsWin) {
  spit(dir_ / "run.cfg", "# run\nmethod = mrmr\nk = 3\nbins=5\n");
  auto args = german_args("select", "c");
  args.insert(args.end(), {"--config", (dir_ / "run.cfg").string(), "--k", "4"});
  const auto r = qpfs_run(args);
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  const auto sel = slurp(dir_ / "c" / "selection.tsv");
  EXPECT_NE(sel.find("method=mrmr k=4"), std::string::npos) << sel;

  spit(dir_ / "bad.cfg", "no-equals-sign\n");
  args = german_args("select", "c");
  args.insert(args.end(), {"--config", (dir_ / "bad.cfg").string()});
  EXPECT_EQ(qpfs_run(args).code, cli::kConfigError);
}

TEST_F(Cli, ReproduceOnlyGermanGivesOneTable) {
  const auto r = qpfs_run({"reproduce", "--data-dir", QPFS_DATA_DIR, "--only", "german", "--out-dir",
                           (dir_ / "rep").string()});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  const auto tables = slurp(dir_ / "rep" / "tables.txt");
  EXPECT_NE(tables.find("german ("), std::string::npos);
  EXPECT_EQ(tables.find("australian"), std::string::npos);
  for (const char* m : {"Quadratic", "ReliefF", "Information Gain", "CFS", "mRMR", "MaxRel"})
    EXPECT_NE(tables.find(m), std::string::npos) << m;
  EXPECT_TRUE(fs::exists(dir_ / "rep" / "deltas.tsv"));
}

TEST_F(Cli, CorruptSchemaNamesTheLine) {
  const auto d = dir_ / "ds";
  fs::create_directories(d);
  fs::copy_file(oracle::data_path("german.data"), d / "german.data");
  auto schema = slurp(oracle::data_path("german.schema"));
  const auto third = schema.find('\n', schema.find('\n', schema.find('\n') + 1) + 1) + 1;
  schema.insert(third, "broken line with too many words here\n");
  spit(d / "german.schema", schema);
  fs::copy_file(oracle::data_path("published_results.tsv"), d / "published_results.tsv");
  const auto r = qpfs_run({"reproduce", "--data-dir", d.string(), "--only", "german", "--out-dir",
                           (dir_ / "rep").string()});
  EXPECT_EQ(r.code, cli::kConfigError);
  // Line number of the inserted line, counting comments and blanks.
  const auto line = std::count(schema.begin(), schema.begin() + third, '\n') + 1;
  EXPECT_NE(r.err.find("german.schema:" + std::to_string(line)), std::string::npos) << r.err;
}

TEST_F(Cli, InspectToyMatchesHandMi) {
  spit(dir_ / "toy.schema", "f1 categorical feature\nf2 categorical feature\ny binary target\n");
  // f1 determines y; f2 is balanced and independent of both.
  spit(dir_ / "toy.csv", "a,p,0\nb,p,1\na,q,0\nb,q,1\n");
  const auto out = dir_ / "i";
  const auto r = qpfs_run({"inspect", "--data", (dir_ / "toy.csv").string(), "--schema",
                           (dir_ / "toy.schema").string(), "--q-diagonal", "entropy", "--out-dir",
                           out.string()});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  const auto q = parse_redundancy(slurp(out / "redundancy.tsv"));
  const auto f = parse_relevance(slurp(out / "relevance.tsv"));
  // By hand: H(f1) = H(f2) = 1 bit, I(f1;f2) = 0, I(f1;y) = 1, I(f2;y) = 0.
  EXPECT_DOUBLE_EQ(q.values(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(q.values(1, 1), 1.0);
  EXPECT_EQ(q.values(0, 1), 0.0);
  EXPECT_DOUBLE_EQ(f.values(0), 1.0);
  EXPECT_EQ(f.values(1), 0.0);
  // alpha_hat = mean(Q) / (mean(Q) + mean(F)) = 0.5 / (0.5 + 0.5)
  EXPECT_NE(slurp(out / "summary.tsv").find("alpha_hat\t0.5\n"), std::string::npos);
}

TEST_F(Cli, InspectZeroDiagonal) {
  auto args = german_args("inspect", "z");
  args.insert(args.end(), {"--q-diagonal", "zero"});
  ASSERT_EQ(qpfs_run(args).code, cli::kOk);
  const auto q = parse_redundancy(slurp(dir_ / "z" / "redundancy.tsv"));
  ASSERT_EQ(q.size(), 20u);
  EXPECT_TRUE(q.values.diagonal().isZero(0));
  EXPECT_EQ(parse_relevance(slurp(dir_ / "z" / "relevance.tsv")).size(), 20u);
}

TEST_F(Cli, FetchFromFileUrls) {
  const auto src = dir_ / "src.txt";
  spit(src, "hello\n");
  const auto digest = cli::sha256_hex("hello\n");
  EXPECT_EQ(digest, "5891b5b522d5df086d0ff0b110fbd9d21bb4fc7163af34d08286a2e846f6be03");
  const auto data = dir_ / "d";
  fs::create_directories(data);
  spit(dir_ / "sums.txt", fmt::format("ok.txt {} file://{}\nfree.txt - file://{}\n", digest,
                                      src.string(), src.string()));
  auto r = qpfs_run({"fetch", "--data-dir", data.string(), "--checksums", (dir_ / "sums.txt").string()});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  EXPECT_EQ(slurp(data / "ok.txt"), "hello\n");
  EXPECT_NE(r.out.find("verified"), std::string::npos);
  EXPECT_NE(r.out.find("unpinned"), std::string::npos);

  spit(dir_ / "bad.txt", "tampered\n");
  r = qpfs_run({"fetch", "--data-dir", data.string(), "--checksums", (dir_ / "sums.txt").string(),
                "--only", "ok", "--url", "ok.txt=file://" + (dir_ / "bad.txt").string()});
  EXPECT_EQ(r.code, cli::kDataError);
  EXPECT_NE(r.err.find("checksum mismatch"), std::string::npos);

  r = qpfs_run({"fetch", "--data-dir", data.string(), "--checksums", (dir_ / "sums.txt").string(),
                "--only", "free", "--url", "free.txt=file:///no/such/file"});
  EXPECT_EQ(r.code, cli::kDataError);
}
