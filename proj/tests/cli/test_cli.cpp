#include <doctest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path& workdir() {
  static const fs::path dir = [] {
    const fs::path d = fs::temp_directory_path() / "hdmr_test_cli";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

int hdmrnn(const std::string& args) {
  const std::string cmd = "cd '" + workdir().string() + "' && '" HDMRNN_PATH "' " + args +
                          " >>cli.log 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& name) {
  std::ifstream in(workdir() / name, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const char* kFit =
    "fit --data pair.csv --d 2 --n-per-term 6 --l 0.45 --train 300 --test 200 --seed 7 "
    "--no-timing";

}  // namespace

TEST_CASE("synth writes a dataset with the config echo") {
  REQUIRE(hdmrnn("synth --kind pairwise --dim 3 --n 600 --seed 1 --out pair.csv") == 0);
  const std::string text = slurp("pair.csv");
  CHECK(text.rfind("# config={\"command\":\"synth\"", 0) == 0);
  CHECK(text.find("\nx0,x1,x2,t\n") != std::string::npos);
}

TEST_CASE("fit, eval and rerun reproduce bit-exactly") {
  REQUIRE(hdmrnn(std::string(kFit) + " --out a.model") == 0);
  REQUIRE(hdmrnn(std::string(kFit) + " --out b.model --report b.json") == 0);
  const json a = json::parse(slurp("a.model.report.json"));
  const json b = json::parse(slurp("b.json"));
  CHECK(a["test_rmse"] == b["test_rmse"]);
  CHECK(a["timing"].is_null());
  CHECK(a["config"]["args"]["l"] == "0.45");
  CHECK(a["test_rmse"].get<double>() < 1e-2);

  const std::string model = slurp("a.model");
  REQUIRE(hdmrnn("eval --model a.model --data pair.csv --seed 7 --test 200 --report e.json") == 0);
  const json e = json::parse(slurp("e.json"));
  for (const char* key : {"train_rmse", "test_rmse", "train_corr", "test_corr", "train_size",
                          "test_size"}) {
    CHECK(e[key].dump() == a[key].dump());
  }

  const std::string report = slurp("a.model.report.json");
  REQUIRE(hdmrnn("rerun a.model") == 0);
  CHECK(slurp("a.model") == model);
  CHECK(slurp("a.model.report.json") == report);
}

TEST_CASE("predict") {
  REQUIRE(hdmrnn(std::string(kFit) + " --out p.model") == 0);
  REQUIRE(hdmrnn("predict --model p.model --data pair.csv --out preds.csv") == 0);
  std::istringstream lines(slurp("preds.csv"));
  std::string line;
  int rows = 0;
  std::getline(lines, line);
  CHECK(line.rfind("# config=", 0) == 0);
  std::getline(lines, line);
  CHECK(line == "prediction");
  while (std::getline(lines, line)) ++rows;
  CHECK(rows == 600);

  std::ofstream(workdir() / "empty.csv") << "x0,x1,x2\n";
  CHECK(hdmrnn("predict --model p.model --data empty.csv --out none.csv") == 0);
  CHECK(slurp("none.csv").find("\nprediction\n") != std::string::npos);
  CHECK(slurp("none.csv").back() == '\n');

  std::ofstream(workdir() / "wide.csv") << "a,b,c,d,e\n1,2,3,4,5\n";
  CHECK(hdmrnn("predict --model p.model --data wide.csv --out w.csv") == 5);
  CHECK(hdmrnn("eval --model p.model --data wide.csv") == 5);
}

TEST_CASE("exit codes") {
  CHECK(hdmrnn("") == 2);
  CHECK(hdmrnn("fit --data pair.csv --d 2 --n-per-term 6 --train 300 --seed 7 --out x.model") == 2);
  CHECK(slurp("cli.log").find("required flags for 'fit': --data --d --n-per-term --l --train "
                              "--seed --out") != std::string::npos);
  CHECK(hdmrnn("fit --data pair.csv --d 7 --n-per-term 6 --l 0.4 --train 300 --seed 7 "
               "--out x.model") == 2);
  CHECK(hdmrnn("fit --data missing.csv --d 1 --n-per-term 0 --l 0.4 --train 30 --seed 7 "
               "--out x.model") == 3);
  CHECK(!fs::exists(workdir() / "x.model"));
  CHECK(hdmrnn("eval --model p.model --data pair.csv --target nope") == 2);
  CHECK(hdmrnn("fit --data pair.csv --d 1 --n-per-term 0 --l -1 --train 30 --seed 7 "
               "--out x.model") == 2);
  CHECK(hdmrnn("fit --data pair.csv --d 1 --n-per-term 0 --l 0.4 --noise 0 --train 30 "
               "--seed 7 --out x.model") == 2);

  std::string text = slurp("p.model");
  text.resize(text.size() / 2);
  std::ofstream(workdir() / "broken.model") << text;
  CHECK(hdmrnn("predict --model broken.model --data pair.csv --out z.csv") == 3);
}

TEST_CASE("sweep and components") {
  const std::string sweep =
      "sweep --data pair.csv --d 1,2 --n-per-term 0,4 --repeats 2 --train 150 --test 200 "
      "--l 0.45 --seed 3 --no-timing ";
  REQUIRE(hdmrnn(sweep + "--jobs 1 --out s1") == 0);
  REQUIRE(hdmrnn(sweep + "--jobs 3 --out s3") == 0);
  for (const char* f : {"sweep.csv", "summary.csv", "best_by_order.csv"}) {
    const std::string a = slurp(std::string("s1/") + f);
    const std::string b = slurp(std::string("s3/") + f);
    CHECK(a.substr(a.find('\n')) == b.substr(b.find('\n')));
  }
  CHECK(slurp("s1/sweep.csv").find(
            "\nd,N,repeat,seed,train_rmse,test_rmse,train_corr,test_corr,wall_s,status\n") !=
        std::string::npos);
  CHECK(json::parse(slurp("s1/config.json"))["config"]["command"] == "sweep");

  REQUIRE(hdmrnn("components --model p.model --grid 21 --out curves") == 0);
  for (const char* f : {"term_x0.csv", "term_x1.csv", "term_x2.csv", "term_x0_x1.csv",
                        "term_x0_x2.csv", "term_x1_x2.csv", "components.csv", "importance.csv"}) {
    CHECK_MESSAGE(fs::exists(workdir() / "curves" / f), f);
  }
  CHECK(slurp("curves/term_x0.csv").find("\nterm,grid,value\nx0,0,") != std::string::npos);
}
