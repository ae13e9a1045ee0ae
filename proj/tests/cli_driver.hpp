#pragma once

// Runs every CLI command as a small end-to-end pipeline inside a directory.
// Two runs in fresh directories must leave byte-identical files.

#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

namespace nll::testing {

struct CliStep {
  std::string name;
  std::string args;
  int exit_code = -1;
};

inline void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline int run_shell(const std::string& command) {
  const int status = std::system(command.c_str());
  if (status == -1) return -1;
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

inline std::vector<CliStep> cli_pipeline() {
  return {
      {"noise make uniform", "noise make --kind uniform --k 2 --rate 0.25 --out noise.json"},
      {"noise make pair", "noise make --kind pair --k 3 --rate 0.2 > pair_noise.json"},
      {"data world", "data world --out world.json"},
      {"data make moons", "data make --kind moons --m 300 --seed 1 --out clean.csv"},
      {"data make circles", "data make --kind circles --m 100 --sigma 0.05 --seed 2 --out circles.csv"},
      {"data make test", "data make --kind moons --m 500 --seed 9 --out test.csv"},
      {"data corrupt", "data corrupt --noise noise.json --seed 2 --in clean.csv --out noisy.csv"},
      {"data split", "data split --val-frac 0.25 --seed 3 --in noisy.csv --train-out train.csv --val-out val.csv"},
      {"data make tabular", "data make --kind tabular --m 40 --seed 4 --out tab_clean.csv"},
      {"data corrupt tabular", "data corrupt --noise noise.json --seed 5 --in tab_clean.csv --out tab_noisy.csv"},
      {"train", "train --data train.csv --val val.csv --config train.json --out model.json --checkpoints ckpt.csv"},
      {"bounds gen", "bounds gen --m 100000 --dvc 10 --delta 0.05 --out gen.json"},
      {"bounds val", "bounds val --n 1000 --delta 0.01 --out val_bound.json"},
      {"bounds val bonferroni", "bounds val --n 1000 --delta 0.01 --selections 40 > val_bonf.json"},
      {"bounds audit assignment",
       "bounds audit --model hstar.json --world world.json --noise noise.json --n 200 --delta 0.05 --trials 300 "
       "--seed 4 --workers 2 --out audit_hstar.json"},
      {"bounds audit mlp",
       "bounds audit --model model.json --world world.json --noise noise.json --n 200 --delta 0.05 --trials 300 "
       "--seed 4 --out audit_mlp.json"},
      {"oracle best noisy", "oracle best --world world.json --noise noise.json --out best_noisy.json"},
      {"oracle best clean", "oracle best --world world.json --clean --workers 2 > best_clean.json"},
      {"oracle best sample", "oracle best --world world.json --sample tab_noisy.csv --out best_sample.json"},
      {"nts", "nts --train train.csv --val val.csv --test test.csv --config train.json --report nts.json"},
      {"sweep", "sweep --config sweep.json --out sweep"},
      {"demo tabular", "demo tabular --seed 3 --out demo"},
      {"audit bounds", "audit bounds --seed 2 --trials 300 --workers 2 --out audit"},
  };
}

/// Writes the pipeline's input configs into `dir` and runs every step there.
inline std::vector<CliStep> run_cli_pipeline(const std::string& cli, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_file(dir / "train.json", R"({"hidden_layers": [8, 8], "max_steps": 200, "checkpoint_every": 50})");
  write_file(dir / "hstar.json", R"({"assignment": [0, 0, 0, 0, 1, 1, 1, 1]})");
  write_file(dir / "sweep.json", R"({"sizes": [16, 32], "repeats": 2, "test_size": 200, "seed": 5,
    "train": {"hidden_layers": [8, 8], "max_steps": 100, "checkpoint_every": 50}})");
  auto steps = cli_pipeline();
  for (auto& s : steps) {
    const std::string stdout_sink = s.args.find('>') == std::string::npos ? " >>stdout.log" : "";
    s.exit_code = run_shell("cd '" + dir.string() + "' && '" + cli + "' " + s.args + stdout_sink + " 2>>stderr.log");
  }
  return steps;
}

/// Relative paths of every regular file under `dir`, sorted.
inline std::vector<std::filesystem::path> list_files(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> out;
  for (const auto& e : std::filesystem::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) out.push_back(std::filesystem::relative(e.path(), dir));
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace nll::testing
