#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "json.hpp"

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::initializer_list<const char*> args) {
  std::vector<const char*> argv{"convshield"};
  argv.insert(argv.end(), args.begin(), args.end());
  std::ostringstream out, err;
  const int code = convshield::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("convshield_test_" + name);
}

}  // namespace

TEST(Cli, BoundAverage) {
  const Result r = run({"bound", "--pool", "avg", "--height", "8", "--width", "8", "--a", "-0.1",
                        "--b", "0.1", "--p", "0.05"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_NEAR(j["gamma"].get<double>(), 0.033952, 1e-6);
  EXPECT_EQ(j["pooling"], "avg");
  EXPECT_EQ(j["H"], 8);
  EXPECT_EQ(j["saturated"], false);
}

TEST(Cli, BoundCsvMatchesJson) {
  const Result j = run({"bound", "--pool", "max", "--height", "8", "--width", "8", "--a", "-0.1",
                        "--b", "0.1", "--gamma", "6.23028"});
  const Result c = run({"bound", "--pool", "max", "--height", "8", "--width", "8", "--a", "-0.1",
                        "--b", "0.1", "--gamma", "6.23028", "--format", "csv"});
  ASSERT_EQ(j.code, 0);
  ASSERT_EQ(c.code, 0);
  const auto rows = lines(c.out);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0], "pooling,H,W,a,b,gamma,p,saturated");
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", nlohmann::json::parse(j.out)["p"].get<double>());
  EXPECT_NE(rows[1].find(buf), std::string::npos) << rows[1];
}

TEST(Cli, BoundUsageErrors) {
  EXPECT_EQ(run({"bound", "--pool", "avg", "--height", "8", "--width", "8", "--a", "0", "--b",
                 "1"}).code, 2);
  EXPECT_EQ(run({"bound", "--pool", "max", "--height", "8", "--width", "8", "--a", "0", "--b",
                 "1", "--p", "1.5"}).code, 2);
  EXPECT_EQ(run({"bound", "--pool", "median", "--height", "8", "--width", "8", "--a", "0",
                 "--b", "1", "--p", "0.1"}).code, 2);
  EXPECT_EQ(run({"bound", "--pool", "avg", "--height", "8", "--width", "8", "--a", "1", "--b",
                 "0", "--p", "0.1"}).code, 2);
}

TEST(Cli, NoSubcommandOrUnknownPreset) {
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  const Result r = run({"dims", "--preset", "resnet50"});
  EXPECT_EQ(r.code, 2);
  EXPECT_FALSE(r.err.empty());
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST(Cli, Redundancy) {
  const Result r = run({"redundancy", "--scale", "3", "--kernel", "2", "--len", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["apparent_dims"], 5);
  EXPECT_EQ(j["distinct_dims"], 3);
  EXPECT_EQ(j["duplicate_groups"], nlohmann::json::parse("[[1,2],[4,5]]"));
  EXPECT_EQ(run({"redundancy", "--scale", "2", "--kernel", "9", "--len", "2"}).code, 2);
}

TEST(Cli, RewriteThenDims) {
  const auto arch_file = temp_path("rewrite.json");
  const Result rw = run({"rewrite", "--preset", "resnet18", "--strides", "1,1,2,2", "--out",
                         arch_file.c_str()});
  ASSERT_EQ(rw.code, 0) << rw.err;

  auto final_map = [](const std::string& csv) {
    const auto rows = lines(csv);
    std::string last_conv;
    for (const auto& row : rows)
      if (row.find(",conv,") != std::string::npos) last_conv = row;
    return last_conv.substr(last_conv.rfind(',') + 1);
  };
  const Result wide = run({"dims", "--arch", arch_file.c_str(), "--input", "32", "--format", "csv"});
  const Result base = run({"dims", "--preset", "resnet18", "--input", "32", "--format", "csv"});
  ASSERT_EQ(wide.code, 0) << wide.err;
  ASSERT_EQ(base.code, 0) << base.err;
  EXPECT_EQ(final_map(wide.out), "(512x8x8)");
  EXPECT_EQ(final_map(base.out), "(512x4x4)");
  std::filesystem::remove(arch_file);
}

TEST(Cli, MalformedArchFile) {
  const auto path = temp_path("bad.json");
  std::ofstream(path) << R"({"layers": [{"type": "conv"}]})";
  EXPECT_EQ(run({"dims", "--arch", path.c_str(), "--input", "32"}).code, 2);
  std::ofstream(path) << "not json";
  EXPECT_EQ(run({"cost", "--arch", path.c_str(), "--input", "32"}).code, 2);
  std::filesystem::remove(path);
  EXPECT_EQ(run({"dims", "--arch", "/nonexistent.json"}).code, 2);
}

TEST(Cli, RfReportsGlobalLayer) {
  const Result r = run({"rf", "--preset", "resnet18", "--strides", "1-1-1-2", "--input", "32"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(nlohmann::json::parse(r.out)["global_layer"], 15);
  const Result csv = run({"rf", "--preset", "resnet18", "--input", "32", "--format", "csv"});
  EXPECT_EQ(lines(csv.out)[0], "conv_index,layer_index,receptive_field,jump,height,width,global");
}

TEST(Cli, CostJsonAndCsvAgree) {
  const Result j = run({"cost", "--preset", "toy", "--input", "32"});
  const Result c = run({"cost", "--preset", "toy", "--input", "32", "--format", "csv"});
  ASSERT_EQ(j.code, 0) << j.err;
  ASSERT_EQ(c.code, 0) << c.err;
  const auto doc = nlohmann::json::parse(j.out);
  const auto rows = lines(c.out);
  EXPECT_EQ(rows[0], "index,type,shape,flops,activation_memory_bytes,param_count");
  EXPECT_EQ(rows.size(), doc["layers"].size() + 2);
  const std::string total = rows.back();
  EXPECT_EQ(total.rfind("total,", 0), 0u);
  EXPECT_NE(total.find(std::to_string(doc["totals"]["flops"].get<std::uint64_t>())), std::string::npos);
}

TEST(Cli, UpsampledCostIsLarger) {
  const Result base = run({"cost", "--preset", "resnet18", "--input", "32"});
  const Result up = run({"cost", "--preset", "resnet18", "--input", "32", "--upsample", "2"});
  ASSERT_EQ(up.code, 0) << up.err;
  EXPECT_GT(nlohmann::json::parse(up.out)["totals"]["flops"].get<double>(),
            nlohmann::json::parse(base.out)["totals"]["flops"].get<double>());
}

TEST(Cli, SimulateDeterministicAcrossThreads) {
  const Result a = run({"simulate", "--trials", "12", "--sizes", "8,12", "--seed", "5",
                        "--threads", "1"});
  const Result b = run({"simulate", "--trials", "12", "--sizes", "8,12", "--seed", "5",
                        "--threads", "3"});
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  const auto doc = nlohmann::json::parse(a.out);
  EXPECT_EQ(doc["arms"].size(), 2u);
}

TEST(Cli, SimulateCsvHeaderAndOutFile) {
  const auto path = temp_path("sim.csv");
  const Result r = run({"simulate", "--trials", "4", "--sizes", "8", "--pool", "avg", "--format",
                        "csv", "--out", path.c_str()});
  ASSERT_EQ(r.code, 0) << r.err;
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "pooling,input_h,input_w,layer,layer_type,statistic,trial,channel,value");
  std::filesystem::remove(path);
}

TEST(Cli, SimulateRejectsBadNumbers) {
  EXPECT_EQ(run({"simulate", "--epsilon", "-1"}).code, 2);
  EXPECT_EQ(run({"simulate", "--trials", "0"}).code, 2);
  EXPECT_EQ(run({"simulate", "--init", "orthogonal"}).code, 2);
}

TEST(Cli, InvarianceAndLipschitz) {
  const Result inv = run({"invariance", "--preset", "toy", "--epsilons", "0,0.1", "--inputs", "2",
                          "--trials", "5", "--input", "8", "--format", "csv"});
  ASSERT_EQ(inv.code, 0) << inv.err;
  const auto rows = lines(inv.out);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0], "epsilon,unchanged,total,fraction");
  EXPECT_EQ(rows[1], "0,10,10,1");

  const Result lip = run({"lipschitz", "--preset", "toy", "--probes", "4", "--pairs", "6",
                          "--input", "8", "--seed", "3"});
  ASSERT_EQ(lip.code, 0) << lip.err;
  EXPECT_GT(nlohmann::json::parse(lip.out)["lower_bound"].get<double>(), 0.0);
  EXPECT_EQ(lip.out, run({"lipschitz", "--preset", "toy", "--probes", "4", "--pairs", "6",
                          "--input", "8", "--seed", "3"}).out);
}
