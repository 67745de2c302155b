#include <doctest.h>
#include <json.hpp>

#include <sys/wait.h>

#include <algorithm>
#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

const fs::path& work_dir() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / "fairtopk_cli_test";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

Run run(const std::string& args) {
  const char* cli = std::getenv("FAIRTOPK_CLI");
  REQUIRE(cli != nullptr);
  const std::string cmd = "FAIR_TOPK_CACHE_DIR='" + (work_dir() / "cache").string() + "' '" + cli + "' " + args +
                          " 2>/dev/null";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string write_file(const std::string& name, const std::string& content) {
  const auto path = work_dir() / name;
  std::ofstream(path) << content;
  return "'" + path.string() + "'";
}

std::string sequence_csv(const std::string& name, const std::string& groups, char protected_letter) {
  std::string csv = "id,protected\n";
  for (std::size_t i = 0; i < groups.size(); ++i) {
    csv += std::to_string(i + 1) + "," + (groups[i] == protected_letter ? "1" : "0") + "\n";
  }
  return write_file(name, csv);
}

std::string last_line(const std::string& s) {
  auto t = s;
  while (!t.empty() && t.back() == '\n') t.pop_back();
  return t.substr(t.rfind('\n') + 1);
}

}  // namespace

TEST_CASE("mtable subcommand examples") {
  auto r = run("mtable --k 12 --p 0.5 --alpha 0.1");
  CHECK(r.code == 0);
  CHECK(last_line(r.out) == "12,4");
  r = run("mtable --k 12 --p 0.1 --alpha 0.1");
  CHECK(r.out == "position,minimum\n1,0\n2,0\n3,0\n4,0\n5,0\n6,0\n7,0\n8,0\n9,0\n10,0\n11,0\n12,0\n");
  r = run("mtable --k 1 --p 0.5 --alpha 0.6 --json");
  CHECK(nlohmann::json::parse(r.out)["minima"] == nlohmann::json::array({1}));
  CHECK(run("mtable --k 40 --p 0.1 --adjust").code == 1);
  CHECK(run("mtable --k 100 --p 0.5 --adjust").code == 0);
}

TEST_CASE("adjust subcommand examples") {
  auto r = run("adjust --k 1500 --p 0.1 --alpha 0.1 --json");
  CHECK(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(std::abs(j["alpha_adj"].get<double>() - 0.0122) <= 0.005);
  CHECK(j["feasible"] == true);
  r = run("adjust --k 40 --p 0.1 --alpha 0.1");
  CHECK(r.code == 1);
  CHECK(r.out.find(",false\n") != std::string::npos);
  CHECK(fs::exists(work_dir() / "cache" / "adjustments.csv"));
}

TEST_CASE("verify subcommand examples") {
  const auto economist = sequence_csv("economist.csv", "fmmmmmmmmm", 'f');
  auto r = run("verify " + economist + " --p 0.4 --alpha 0.1 --raw --json");
  CHECK(r.code == 0);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j["fair"] == false);
  CHECK(j["first_violation"] == 9);
  CHECK(j["deficit"] == 1);
  CHECK(run("verify " + economist + " --p 0.4 --alpha 0.1 --raw --strict").code == 1);

  r = run("verify " + sequence_csv("copywriter.csv", "mmmmmmfmmm", 'f') + " --p 0.4 --raw --strict");
  CHECK(r.code == 1);
  CHECK(last_line(r.out) == "10,0.400000,0.100000,false,5,1,0,1");

  r = run("verify " + sequence_csv("analyst.csv", "fmfffffmff", 'm') + " --p 0.4 --raw --strict");
  CHECK(r.code == 0);
  CHECK(last_line(r.out).find(",true,0,") != std::string::npos);

  CHECK(run("verify " + economist + " --p 0.4 --raw --adjusted").code == 2);
}

TEST_CASE("rank subcommand") {
  const auto pool = write_file("pool.csv",
                               "id,score,protected\nnp0.9,0.9,0\nnp0.8,0.8,0\nnp0.7,0.7,0\nnp0.6,0.6,0\n"
                               "p0.5,0.5,1\np0.4,0.4,1\n");
  auto r = run("rank " + pool + " --k 4 --p 0.5 --alpha 0.1 --raw");
  CHECK(r.code == 0);
  CHECK(r.out == "rank,id,score,protected\n1,np0.9,0.9,0\n2,np0.8,0.8,0\n3,np0.7,0.7,0\n4,p0.5,0.5,1\n");
  r = run("rank " + pool + " --k 2 --method colorblind --json");
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["ranking"][1]["id"] == "np0.8");
  r = run("rank " + pool + " --k 3 --method feldman");
  CHECK(r.code == 0);
  CHECK(r.out.find("p0.5") != std::string::npos);
  CHECK(run("rank " + pool + " --k 4 --p 0.5 --raw --seed 7").out ==
        run("rank " + pool + " --k 4 --p 0.5 --raw --seed 8").out);

  const auto scarce = write_file("scarce.csv", "id,score,protected\na,3,0\nb,2,0\nc,1,0\nd,0.5,1\n");
  CHECK(run("rank " + scarce + " --k 4 --p 0.9 --alpha 0.3 --raw").code == 0);
  CHECK(run("rank " + scarce + " --k 4 --p 0.9 --alpha 0.3 --raw --strict").code == 1);
  CHECK(run("rank " + scarce + " --k 9 --method colorblind").code == 2);
  CHECK(run("rank " + scarce + " --k 2").code == 2);
}

TEST_CASE("simulate subcommand is deterministic") {
  const auto a = run("simulate --k 4 --p 0.5 --alpha-adj 0.1 --trials 100000 --seed 3 --json");
  CHECK(a.code == 0);
  const auto j = nlohmann::json::parse(a.out);
  CHECK(std::abs(j["rejection_rate"].get<double>() - 0.0625) <= 3 * j["stderr"].get<double>());
  CHECK(run("simulate --k 4 --p 0.5 --alpha-adj 0.1 --trials 100000 --seed 3 --json --threads 1").out == a.out);
}

TEST_CASE("experiment and curve subcommands") {
  const auto data = write_file("exp.csv", "id,score,protected\n1,9,0\n2,8,0\n3,7,1\n4,6,0\n5,5,1\n6,4,1\n");
  const auto cfg = write_file("exp.cfg", "name = tiny\npath = exp.csv\nk = 4\np_grid = 0.3, 0.6\n");
  const auto r = run("experiment --config " + cfg);
  CHECK(r.code == 0);
  CHECK(r.out.rfind("dataset,method,p,pct_protected_output,ndcg,ordering_utility_loss,rank_drop,", 0) == 0);
  CHECK(r.out.find("tiny,color-blind,0.300000,25.000000,1.000000,0.000000,0,0.000000\n") != std::string::npos);
  CHECK(run("experiment --config " + cfg + " --json").code == 0);
  (void)data;
  CHECK(run("experiment --config " + write_file("broken.cfg", "path = nowhere.csv\nk = 2\np_grid = 0.5\n")).code == 3);

  const auto c = run("curve --k 4 --p-grid 0.5 --alpha-adj-grid 0.1 --trials 1000");
  CHECK(c.code == 0);
  CHECK(c.out.find("4,0.500000,0.100000,0.062500,") != std::string::npos);
}

TEST_CASE("prepare subcommands") {
  const auto raw = write_file("xing_raw.csv", "id,work_experience_months,education_months,views\n1,1,2,3\n");
  auto r = run("prepare xing " + raw);
  CHECK(r.out == "id,work_experience_months,education_months,views,score\n1,1,2,3,9\n");
  const char* data_dir = std::getenv("FAIRTOPK_DATA_DIR");
  REQUIRE(data_dir);
  r = run(std::string("prepare german '") + data_dir + "/german_credit/german.data'");
  CHECK(r.code == 0);
  CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 1001);
}

TEST_CASE("usage and data errors") {
  CHECK(run("").code == 2);
  CHECK(run("bogus").code == 2);
  CHECK(run("mtable --p 0.5").code == 2);
  CHECK(run("mtable --k 5 --p 1.5").code == 2);
  CHECK(run("adjust --k 5 --p 0.5 --alpha 0").code == 2);
  CHECK(run("verify /no/such/file.csv --p 0.5").code == 3);
  CHECK(run("verify " + write_file("bad.csv", "id,group\n1,0\n") + " --p 0.5").code == 3);
}

TEST_CASE("help documents every subcommand and the exit codes") {
  const auto top = run("--help");
  CHECK(top.code == 0);
  for (const char* sub : {"mtable", "adjust", "verify", "rank", "simulate", "experiment", "curve", "prepare"}) {
    CAPTURE(sub);
    CHECK(top.out.find(sub) != std::string::npos);
    const auto h = run(std::string(sub) + " --help");
    CHECK(h.code == 0);
    CHECK(h.out.find("Exit codes") != std::string::npos);
  }
}
