// bat/tests/cli_test.cc
//
// Copyright (c)  2026  bat-lattice authors
//
// Runs the `bat` binary as a subprocess.

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "bat/bat_loss.h"
#include "bat/cif.h"
#include "bat/format.h"
#include "bat/model.h"
#include "bat/rnnt_loss.h"
#include "bat/tensor_io.h"
#include "doctest.h"
#include "oracle/path_enumeration.h"

namespace bat {

namespace {

namespace fs = std::filesystem;

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string Slurp(const fs::path &path) {
  std::ifstream in(path);
  return std::string((std::istreambuf_iterator<char>(in)), {});
}

class Sandbox {
 public:
  Sandbox() {
    dir_ = fs::temp_directory_path() / ("bat_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(dir_);
  }
  ~Sandbox() { fs::remove_all(dir_); }

  std::string Path(const std::string &name) const { return (dir_ / name).string(); }

  RunResult Run(const std::string &args) const {
    std::string cmd = std::string(BAT_CLI_PATH) + " " + args + " >" + Path("stdout") +
                      " 2>" + Path("stderr");
    int status = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = Slurp(Path("stdout"));
    r.err = Slurp(Path("stderr"));
    return r;
  }

 private:
  fs::path dir_;
};

Tensor<int64_t> LabelTensor(const LabelSeq &y) {
  std::vector<int64_t> v(y.tokens().begin(), y.tokens().end());
  return Tensor<int64_t>({y.size()}, v);
}

}  // namespace

TEST_CASE("loss prints the library loss and writes its gradient") {
  Sandbox box;
  Rng rng(21);
  auto lp = oracle::RandomLattice(rng, 5, 3, 4);
  auto y = oracle::RandomLabels(rng, 3, 4);
  WriteTensor(box.Path("l.bat1"), lp);
  WriteTensor(box.Path("y.bat1"), LabelTensor(y));
  auto expected = RnntLoss(LogitLattice<double>(lp), y);

  auto r = box.Run("loss --lattice " + box.Path("l.bat1") + " --labels " +
                   box.Path("y.bat1") + " --grad-out " + box.Path("g.bat1"));
  REQUIRE(r.exit_code == 0);
  CHECK(r.out == FormatNumber(expected.loss) + "\n");
  CHECK(ConvertTensor<double>(ReadTensor(box.Path("g.bat1"))) == expected.grad);

  Tensor<float> lp32({5, 4, 5});
  std::copy(lp.Storage().begin(), lp.Storage().end(), lp32.Data().begin());
  WriteTensor(box.Path("l32.bat1"), lp32);
  auto r32 = box.Run("loss --lattice " + box.Path("l32.bat1") + " --labels " +
                     box.Path("y.bat1"));
  CHECK(r32.exit_code == 0);
  CHECK(r32.out == FormatNumber(RnntLoss(LogitLattice<float>(lp32), y).loss) + "\n");
}

TEST_CASE("bat-loss from a window file, from CIF weights, and infeasible") {
  Sandbox box;
  Rng rng(22);
  const int64_t T = 6, U = 4;
  auto lp = oracle::RandomLattice(rng, T, U, 3);
  auto y = oracle::RandomLabels(rng, U, 3);
  std::vector<double> raw = {0.3, 0.9, 0.5, 0.8, 0.2, 0.7};
  auto window = BuildWindow(AlignmentBoundary(raw, U), U, 1, 0);
  auto banded = GatherBand(LogitLattice<double>(lp), window);
  auto expected = BatLoss(banded, y);

  WriteTensor(box.Path("full.bat1"), lp);
  WriteTensor(box.Path("band.bat1"), banded.log_probs);
  WriteTensor(box.Path("y.bat1"), LabelTensor(y));
  WriteTensor(box.Path("w.bat1"), Tensor<double>({T}, raw));
  WriteTensor(box.Path("o.bat1"), Tensor<int64_t>({T}, window.starts));

  auto a = box.Run("bat-loss --lattice " + box.Path("band.bat1") + " --labels " +
                   box.Path("y.bat1") + " --window " + box.Path("o.bat1") +
                   " --grad-out " + box.Path("g.bat1"));
  REQUIRE(a.exit_code == 0);
  CHECK(a.out == FormatNumber(expected.loss) + "\n");
  CHECK(ConvertTensor<double>(ReadTensor(box.Path("g.bat1"))) == expected.grad);

  auto b = box.Run("bat-loss --lattice " + box.Path("full.bat1") + " --labels " +
                   box.Path("y.bat1") + " --cif-weights " + box.Path("w.bat1") +
                   " --rd 1 --ru 0");
  CHECK(b.exit_code == 0);
  CHECK(b.out == a.out);

  // U = 4 > T + R_d + R_u = 2 + 1 + 0.
  WriteTensor(box.Path("short.bat1"), oracle::RandomLattice(rng, 2, U, 3));
  WriteTensor(box.Path("w2.bat1"), Tensor<double>({2}, {0.5, 0.5}));
  auto c = box.Run("bat-loss --lattice " + box.Path("short.bat1") + " --labels " +
                   box.Path("y.bat1") + " --cif-weights " + box.Path("w2.bat1") +
                   " --rd 1 --ru 0");
  CHECK(c.exit_code == 3);
  CHECK(c.err.find("band infeasible") != std::string::npos);
  CHECK(c.err.rfind("error: code=BandInfeasible exit=3", 0) == 0);

  auto d = box.Run("bat-loss --lattice " + box.Path("band.bat1") + " --labels " +
                   box.Path("y.bat1") + " --window " + box.Path("o.bat1") +
                   " --cif-weights " + box.Path("w.bat1"));
  CHECK(d.exit_code == 1);
}

TEST_CASE("check-grad passes at the documented point and fails a tiny tolerance") {
  Sandbox box;
  auto r = box.Run("check-grad --seed 7 --t 4 --u 3 --v 3");
  CHECK(r.exit_code == 0);
  auto pos = r.out.find("max_rel_err ");
  REQUIRE(pos != std::string::npos);
  CHECK(std::stod(r.out.substr(pos + 12)) < 1e-4);
  CHECK(box.Run("check-grad --seed 7 --t 4 --u 3 --v 3").out == r.out);
  CHECK(box.Run("check-grad --seed 7 --tolerance 1e-15").exit_code == 4);
}

TEST_CASE("usage and data errors map to exit codes") {
  Sandbox box;
  CHECK(box.Run("").exit_code == 1);
  CHECK(box.Run("frobnicate").exit_code == 1);
  CHECK(box.Run("bench --t 5 --bogus 1").exit_code == 1);
  CHECK(box.Run("train --mode sideways --data x").exit_code == 1);
  auto missing = box.Run("loss --lattice " + box.Path("none") + " --labels x");
  CHECK(missing.exit_code == 2);
  CHECK(missing.err.rfind("error: code=Io exit=2 message=", 0) == 0);
  std::ofstream(box.Path("junk.bat1")) << "not a tensor";
  auto junk = box.Run("loss --lattice " + box.Path("junk.bat1") + " --labels x");
  CHECK(junk.exit_code == 2);
  CHECK(junk.err.find("code=BadMagic") != std::string::npos);
  CHECK(box.Run("--help").exit_code == 0);
}

TEST_CASE("flags override the config file, which overrides defaults") {
  Sandbox box;
  std::ofstream(box.Path("cfg")) << "# bench settings\nt = 20\nu=5\nv=7\nrepeats=3\n"
                                     "warmup=0\n";
  auto r = box.Run("--config " + box.Path("cfg") + " bench --t 12");
  REQUIRE(r.exit_code == 0);
  auto line = r.out.substr(r.out.find('\n') + 1);
  CHECK(line.rfind("full,1,12,5,7,", 0) == 0);
  std::ofstream(box.Path("bad")) << "t\n";
  CHECK(box.Run("--config " + box.Path("bad") + " bench").exit_code == 1);
  std::ofstream(box.Path("unknown")) << "nonsense=1\n";
  CHECK(box.Run("--config " + box.Path("unknown") + " bench").exit_code == 1);
}

TEST_CASE("dump-cif writes weights and boundary") {
  Sandbox box;
  WriteTensor(box.Path("w.bat1"), Tensor<double>({3}, {0.5, 0.5, 0.5}));
  auto r = box.Run("dump-cif --weights " + box.Path("w.bat1") + " --u 2 --out " +
                   box.Path("cif.csv"));
  REQUIRE(r.exit_code == 0);
  CHECK(Slurp(box.Path("cif.csv")) ==
        "t,omega_raw,omega_scaled,C_t\n"
        "0,0.5,0.666666667,1\n"
        "1,0.5,0.666666667,2\n"
        "2,0.5,0.666666667,2\n");
}

TEST_CASE("bench and synth outputs repeat exactly") {
  Sandbox box;
  const std::string args = " bench --t 30 --u 8 --v 16 --repeats 3 --out ";
  REQUIRE(box.Run("--seed 5" + args + box.Path("a.csv")).exit_code == 0);
  REQUIRE(box.Run("--seed 5" + args + box.Path("b.csv")).exit_code == 0);
  CHECK(Slurp(box.Path("a.csv")) == Slurp(box.Path("b.csv")));

  REQUIRE(box.Run("--seed 2 synth --n 5 --out " + box.Path("s1.jsonl")).exit_code == 0);
  REQUIRE(box.Run("--seed 2 synth --n 5 --out " + box.Path("s2.jsonl")).exit_code == 0);
  CHECK(Slurp(box.Path("s1.jsonl.feats.bat1")) == Slurp(box.Path("s2.jsonl.feats.bat1")));
}

TEST_CASE("synth, train, decode and latency chain together") {
  Sandbox box;
  auto tr = box.Path("train.jsonl"), ev = box.Path("eval.jsonl");
  REQUIRE(box.Run("--seed 3 synth --n 12 --vocab 5 --input-dim 5 --out " + tr).exit_code == 0);
  REQUIRE(box.Run("--seed 4 synth --n 4 --vocab 5 --input-dim 5 --out " + ev).exit_code == 0);
  const std::string train = "train --data " + tr + " --eval-data " + ev +
                            " --vocab 5 --hidden-dim 8 --joint-dim 8 --pred-dim 4"
                            " --max-steps 6 --batch-size 4 --eval-every 3 --model-out " +
                            box.Path("m.json") + " --log ";
  REQUIRE(box.Run(train + box.Path("log1.csv")).exit_code == 0);
  REQUIRE(box.Run("--threads 2 " + train + box.Path("log2.csv")).exit_code == 0);
  auto log = Slurp(box.Path("log1.csv"));
  CHECK(log == Slurp(box.Path("log2.csv")));
  CHECK(log.rfind("step,loss_total,loss_trans,loss_ce,loss_qua,token_err\n1,", 0) == 0);
  CHECK(std::count(log.begin(), log.end(), '\n') == 7);

  auto d = box.Run("decode --model " + box.Path("m.json") + " --data " + ev +
                   " --frame-ms 40 --out " + box.Path("traces.csv") + " --report " +
                   box.Path("r1.csv"));
  // A barely trained model may emit nothing at all; that is a data error.
  if (d.exit_code == 0) {
    auto l = box.Run("latency --traces " + box.Path("traces.csv") + " --data " + ev +
                     " --frame-ms 40 --report " + box.Path("r2.csv"));
    CHECK(l.exit_code == 0);
    CHECK(Slurp(box.Path("r1.csv")) == Slurp(box.Path("r2.csv")));
  } else {
    CHECK(d.err.find("code=EmptySet") != std::string::npos);
  }
  CHECK(box.Run("train --data " + tr + " --vocab 3").exit_code == 2);
}

TEST_CASE("help output matches the golden file") {
  Sandbox box;
  std::string all;
  for (const char *sub : {"", "loss", "bat-loss", "check-grad", "synth", "train", "decode",
                          "latency", "bench", "dump-cif"}) {
    auto r = box.Run(std::string(sub) + " --help");
    CHECK(r.exit_code == 0);
    all += "$ bat " + std::string(sub) + (*sub ? " " : "") + "--help\n" + r.out + "\n";
  }
  const std::string golden = std::string(BAT_GOLDEN_DIR) + "/cli_help.txt";
  if (std::getenv("BAT_UPDATE_GOLDEN")) std::ofstream(golden) << all;
  CHECK(all == Slurp(golden));
}

}  // namespace bat
