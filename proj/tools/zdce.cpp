/*
 * Copyright 2026 The zdce Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// zdce: command-line front end.
//
//   zdce train     --config cfg.json [overrides...] --out ckpt_dir
//   zdce enhance   --weights w.zdce --out out_dir img1.png [img2.jpg ...]
//   zdce heatmaps  --weights w.zdce --out out_dir img.png
//   zdce metrics   --reference ref.png img1.png [...]
//   zdce bench     [--weights w.zdce] --width 640 --height 480 --repeats 10
//   zdce gradcheck
//
// Exit codes: 0 success, 1 usage/config error, 2 I/O error, 3 format error,
// 4 self-check failure (gradcheck threshold or non-finite training loss).

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "zdce/enhance.hpp"
#include "zdce/gradcheck.hpp"
#include "zdce/image_io.hpp"
#include "zdce/metrics.hpp"
#include "zdce/model_io.hpp"
#include "zdce/trainer.hpp"

namespace fs = std::filesystem;
using namespace zdce;

namespace {

enum Exit { kOk = 0, kUsage = 1, kIo = 2, kFormat = 3, kSelfCheck = 4 };

struct ArchFlags {
  std::optional<int> depth, width, n_iter;

  void add(CLI::App* app) {
    app->add_option("--depth", depth, "Expected network depth l");
    app->add_option("--width", width, "Expected network width f");
    app->add_option("--n-iter,--n_iter", n_iter, "Expected curve iterations n");
  }
  // Rejects weights whose architecture disagrees with explicit flags.
  void check(const NetworkWeights& w) const {
    if ((depth && *depth != w.arch.depth) ||
        (width && *width != w.arch.width) ||
        (n_iter && *n_iter != w.arch.n_iter))
      throw ConfigError("weights file holds architecture " + w.arch.str() +
                        ", which does not match the requested one");
  }
};

fs::path enhanced_name(const fs::path& input, const fs::path& out_dir) {
  return out_dir / (input.stem().string() + ".png");
}

// Reference for input when ref is a directory (match by stem) or a file.
std::optional<fs::path> reference_for(const std::optional<fs::path>& ref,
                                      const fs::path& input) {
  if (!ref)
    return std::nullopt;
  if (!fs::is_directory(*ref))
    return ref;
  for (const char* ext : {".png", ".jpg", ".jpeg", ".JPG", ".PNG"}) {
    fs::path p = *ref / (input.stem().string() + ext);
    if (fs::exists(p))
      return p;
  }
  throw IoError("no reference for " + input.string() + " in " + ref->string());
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Zero-reference low-light image enhancement with pixel-wise "
               "curve estimation"};
  app.require_subcommand(1);

  // train
  auto* train_cmd = app.add_subcommand("train", "Train the curve estimator");
  std::string config_path;
  TrainConfig tc;
  std::optional<std::string> data_dir, out_dir;
  std::optional<int> image_size, batch_size, max_steps, checkpoint_every,
      synthetic_images;
  std::optional<std::uint64_t> seed;
  std::optional<double> val_fraction, lr, E, W_col, W_tv, gamma_min, gamma_max;
  bool degrade = false;
  train_cmd->add_option("--config", config_path, "JSON training config");
  train_cmd->add_option("--data-dir,--data_dir", data_dir, "Directory of training images");
  train_cmd->add_option("--out", out_dir, "Checkpoint directory");
  train_cmd->add_option("--image-size,--image_size", image_size);
  train_cmd->add_option("--batch-size,--batch_size", batch_size);
  train_cmd->add_option("--max-steps,--max_steps", max_steps);
  train_cmd->add_option("--checkpoint-every,--checkpoint_every", checkpoint_every);
  train_cmd->add_option("--synthetic-images,--synthetic_images", synthetic_images,
                        "Train on N generated scenes instead of --data-dir");
  train_cmd->add_option("--seed", seed);
  train_cmd->add_option("--val-fraction,--val_fraction", val_fraction);
  train_cmd->add_option("--lr", lr);
  train_cmd->add_option("--E", E, "Well-exposedness level");
  train_cmd->add_option("--W-col,--W_col", W_col);
  train_cmd->add_option("--W-tv,--W_tv", W_tv);
  train_cmd->add_flag("--degrade", degrade,
                      "Apply a random gamma to every training image");
  train_cmd->add_option("--gamma-min,--gamma_min", gamma_min);
  train_cmd->add_option("--gamma-max,--gamma_max", gamma_max);
  ArchFlags train_arch;
  train_arch.add(train_cmd);

  // enhance
  auto* enhance_cmd = app.add_subcommand("enhance", "Enhance images");
  std::string weights_path;
  std::vector<std::string> inputs;
  std::string enhance_out;
  std::optional<std::string> reference;
  enhance_cmd->add_option("--weights", weights_path)->required();
  enhance_cmd->add_option("--out", enhance_out, "Output directory")->required();
  enhance_cmd->add_option("--reference", reference,
                          "Reference image or directory for PSNR/MAE");
  enhance_cmd->add_option("inputs", inputs, "Input images")->required();
  ArchFlags enhance_arch;
  enhance_arch.add(enhance_cmd);

  // heatmaps
  auto* heat_cmd = app.add_subcommand(
      "heatmaps", "Export iteration-averaged curve parameter maps");
  std::string heat_input, heat_out;
  heat_cmd->add_option("--weights", weights_path)->required();
  heat_cmd->add_option("--out", heat_out, "Output directory")->required();
  heat_cmd->add_option("input", heat_input)->required();
  ArchFlags heat_arch;
  heat_arch.add(heat_cmd);

  // metrics
  auto* metrics_cmd = app.add_subcommand(
      "metrics", "PSNR (dB) and MAE (8-bit units, i.e. x255) against a "
                 "reference; prints path<TAB>psnr_db<TAB>mae_8bit");
  std::string metrics_ref;
  std::vector<std::string> metrics_inputs;
  metrics_cmd->add_option("--reference", metrics_ref,
                          "Reference image or directory (matched by stem)")
      ->required();
  metrics_cmd->add_option("inputs", metrics_inputs)->required();

  // bench
  auto* bench_cmd =
      app.add_subcommand("bench", "Single-threaded inference latency");
  std::optional<std::string> bench_weights;
  int bench_w = 640, bench_h = 480, repeats = 10;
  bench_cmd->add_option("--weights", bench_weights,
                        "Weights file (default: seeded 7-32-8 init)");
  bench_cmd->add_option("--width", bench_w);
  bench_cmd->add_option("--height", bench_h);
  bench_cmd->add_option("--repeats", repeats)->check(CLI::Range(3, 100000));

  // gradcheck
  auto* grad_cmd = app.add_subcommand(
      "gradcheck", "Finite-difference check of every backward pass");
  bool inject_fault = false;
  grad_cmd->add_flag("--inject-fault", inject_fault,
                     "Corrupt one analytic gradient (negative control)")
      ->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  try {
    if (*train_cmd) {
      if (!config_path.empty())
        tc = load_train_config(config_path);
      if (data_dir) tc.data_dir = *data_dir;
      if (out_dir) tc.checkpoint_dir = *out_dir;
      if (image_size) tc.image_size = *image_size;
      if (batch_size) tc.batch_size = *batch_size;
      if (max_steps) tc.max_steps = *max_steps;
      if (checkpoint_every) tc.checkpoint_every = *checkpoint_every;
      if (synthetic_images) tc.synthetic_images = *synthetic_images;
      if (seed) tc.seed = *seed;
      if (val_fraction) tc.val_fraction = *val_fraction;
      if (lr) tc.optimizer.lr = *lr;
      if (E) tc.loss.E = *E;
      if (W_col) tc.loss.W_col = *W_col;
      if (W_tv) tc.loss.W_tv = *W_tv;
      if (degrade) tc.degrade = true;
      if (gamma_min) tc.gamma_min = *gamma_min;
      if (gamma_max) tc.gamma_max = *gamma_max;
      if (train_arch.depth) tc.arch.depth = *train_arch.depth;
      if (train_arch.width) tc.arch.width = *train_arch.width;
      if (train_arch.n_iter) tc.arch.n_iter = *train_arch.n_iter;
      tc.validate();
      std::cout << "step\tl_spa\tl_exp\tl_col\tl_tv\ttotal\n";
      const TrainResult r = train(tc, &std::cout, &std::cerr);
      for (const auto& [step, v] : r.validation)
        std::cerr << "validation step " << step << ": total " << v.total
                  << "\n";
      return kOk;
    }
    if (*enhance_cmd) {
      const NetworkWeights w = load_weights(weights_path);
      enhance_arch.check(w);
      const std::optional<fs::path> ref =
          reference ? std::optional<fs::path>(*reference) : std::nullopt;
      const int count = static_cast<int>(inputs.size());
      std::vector<EnhanceReport> reports(count);
      std::vector<std::string> errors(count);
      std::vector<int> codes(count, kOk);
#pragma omp parallel for schedule(dynamic)
      for (int i = 0; i < count; ++i) {
        const fs::path in = inputs[i];
        try {
          reports[i] = enhance(w, in, enhanced_name(in, enhance_out),
                               reference_for(ref, in));
        } catch (const IoError& e) {
          errors[i] = e.what();
          codes[i] = kIo;
        } catch (const Error& e) {
          errors[i] = e.what();
          codes[i] = kUsage;
        }
      }
      int status = kOk;
      for (int i = 0; i < count; ++i) {
        if (codes[i] != kOk) {
          std::cerr << "error: " << errors[i] << "\n";
          status = std::max(status, codes[i]);
          continue;
        }
        const EnhanceReport& r = reports[i];
        std::cout << r.input.string() << "\t" << r.output.string() << "\t"
                  << r.seconds;
        if (r.psnr)
          std::cout << "\t" << *r.psnr << "\t" << *r.mae;
        std::cout << "\n";
      }
      return status;
    }
    if (*heat_cmd) {
      const NetworkWeights w = load_weights(weights_path);
      heat_arch.check(w);
      for (const fs::path& p : export_heatmaps(w, heat_input, heat_out))
        std::cout << p.string() << "\n";
      return kOk;
    }
    if (*metrics_cmd) {
      for (const std::string& in : metrics_inputs) {
        const fs::path ref = *reference_for(fs::path(metrics_ref), in);
        const Tensor a = to_tensor(read_image(in));
        const Tensor b = to_tensor(read_image(ref));
        std::printf("%s\t%.4f\t%.4f\n", in.c_str(), psnr(a, b), mae(a, b));
      }
      return kOk;
    }
    if (*bench_cmd) {
      const NetworkWeights w = bench_weights ? load_weights(*bench_weights)
                                             : init_weights(ArchConfig{}, 0);
      const LatencyStats s = benchmark_inference(w, bench_w, bench_h, repeats);
      std::printf("size\t%dx%d\nrepeats\t%zu\nmin_s\t%.6f\nmedian_s\t%.6f\n"
                  "mean_s\t%.6f\n",
                  bench_w, bench_h, s.samples.size(), s.min, s.median, s.mean);
      return kOk;
    }
    if (*grad_cmd) {
      GradCheckOptions opt = default_gradcheck_options();
      opt.inject_fault = inject_fault;
      const GradCheckReport report = run_gradcheck(opt);
      std::printf("component\tmax_rel_error\tstatus\n");
      for (const ComponentResult& c : report.components)
        std::printf("%s\t%.3e\t%s\n", c.name.c_str(), c.max_rel_error,
                    c.passed ? "ok" : "FAIL");
      std::printf("threshold\t%.1e\t%s\n", report.threshold,
                  report.passed() ? "ok" : "FAIL");
      return report.passed() ? kOk : kSelfCheck;
    }
  } catch (const FormatError& e) {
    std::cerr << "format error: " << e.what() << "\n";
    return kFormat;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kIo;
  } catch (const NonFiniteLossError& e) {
    std::cerr << "training aborted: " << e.what() << "\n";
    return kSelfCheck;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kIo;
  }
  return kOk;
}
