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

#include "zdce/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <fstream>
#include <ostream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "zdce/curve.hpp"
#include "zdce/image_io.hpp"

namespace zdce {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Seed streams for the independent random choices of a run.
constexpr std::uint64_t kSplitStream = 0x5eed0001;
constexpr std::uint64_t kEpochStream = 0x5eed0002;
constexpr std::uint64_t kDegradeStream = 0x5eed0003;
constexpr std::uint64_t kSceneStream = 0x5eed0004;

std::uint64_t mix(std::uint64_t seed, std::uint64_t stream,
                  std::uint64_t index) {
  // splitmix64 finaliser over the combined inputs.
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1) +
                    0xBF58476D1CE4E5B9ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::string format_breakdown(const LossBreakdown& b) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%.8g\t%.8g\t%.8g\t%.8g\t%.8g", b.l_spa,
                b.l_exp, b.l_col, b.l_tv, b.total);
  return buf;
}

bool finite(const LossBreakdown& b) {
  return std::isfinite(b.l_spa) && std::isfinite(b.l_exp) &&
         std::isfinite(b.l_col) && std::isfinite(b.l_tv) &&
         std::isfinite(b.total);
}

LossBreakdown average(const std::deque<LossBreakdown>& window) {
  LossBreakdown avg;
  if (window.empty())
    return avg;
  for (const LossBreakdown& b : window) {
    avg.l_spa += b.l_spa;
    avg.l_exp += b.l_exp;
    avg.l_col += b.l_col;
    avg.l_tv += b.l_tv;
    avg.total += b.total;
  }
  const double n = static_cast<double>(window.size());
  avg.l_spa /= n;
  avg.l_exp /= n;
  avg.l_col /= n;
  avg.l_tv /= n;
  avg.total /= n;
  return avg;
}

Tensor stack(const std::vector<Tensor>& images, std::span<const int> idx) {
  const Shape s = images[idx[0]].shape();
  Tensor batch(Shape{static_cast<int>(idx.size()), s.c, s.h, s.w});
  const std::size_t item = static_cast<std::size_t>(s.c) * s.plane();
  for (std::size_t i = 0; i < idx.size(); ++i)
    std::copy_n(images[idx[i]].ptr(), item,
                batch.ptr() + i * item);
  return batch;
}

LossBreakdown evaluate(const NetworkWeights& w, const std::vector<Tensor>& set,
                       const LossConfig& cfg) {
  std::deque<LossBreakdown> all;
  for (const Tensor& img : set) {
    const ParamMaps maps = forward(w, img);
    const Tensor y = apply_curves(img, maps);
    all.push_back(total_loss(y, img, maps, cfg));
  }
  return average(all);
}

// Trailing window for the checkpoint's running averages.
constexpr std::size_t kRunningWindow = 50;

} // namespace

void TrainConfig::validate() const {
  arch.validate();
  loss.validate();
  optimizer.validate();
  if (batch_size < 1)
    throw ConfigError("batch_size must be >= 1");
  if (image_size < loss.exp_region || image_size < loss.spa_region)
    throw ConfigError("image_size " + std::to_string(image_size) +
                      " is smaller than a loss region");
  if (max_steps < 0)
    throw ConfigError("max_steps must be >= 0");
  if (checkpoint_every < 0)
    throw ConfigError("checkpoint_every must be >= 0");
  if (!(val_fraction >= 0.0 && val_fraction < 1.0))
    throw ConfigError("val_fraction must lie in [0, 1)");
  if (synthetic_images < 0)
    throw ConfigError("synthetic_images must be >= 0");
  if (!(gamma_min > 0.0 && gamma_min <= gamma_max))
    throw ConfigError("need 0 < gamma_min <= gamma_max");
}

TrainConfig parse_train_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object())
    throw ConfigError("config must be a JSON object");

  TrainConfig cfg;
  auto take = [](const json& obj, const char* section, auto&& fields) {
    for (const auto& [key, value] : obj.items()) {
      if (!fields(key, value))
        throw ConfigError(std::string("unknown config key ") + section + key);
    }
  };
  try {
    take(j, "", [&](const std::string& k, const json& v) {
      if (k == "data_dir") v.get_to(cfg.data_dir);
      else if (k == "image_size") v.get_to(cfg.image_size);
      else if (k == "batch_size") v.get_to(cfg.batch_size);
      else if (k == "max_steps") v.get_to(cfg.max_steps);
      else if (k == "seed") v.get_to(cfg.seed);
      else if (k == "checkpoint_every") v.get_to(cfg.checkpoint_every);
      else if (k == "checkpoint_dir") v.get_to(cfg.checkpoint_dir);
      else if (k == "val_fraction") v.get_to(cfg.val_fraction);
      else if (k == "synthetic_images") v.get_to(cfg.synthetic_images);
      else if (k == "degrade") v.get_to(cfg.degrade);
      else if (k == "gamma_min") v.get_to(cfg.gamma_min);
      else if (k == "gamma_max") v.get_to(cfg.gamma_max);
      else if (k == "arch") {
        take(v, "arch.", [&](const std::string& a, const json& x) {
          if (a == "depth") x.get_to(cfg.arch.depth);
          else if (a == "width") x.get_to(cfg.arch.width);
          else if (a == "n_iter") x.get_to(cfg.arch.n_iter);
          else return false;
          return true;
        });
      } else if (k == "loss") {
        take(v, "loss.", [&](const std::string& a, const json& x) {
          if (a == "E") x.get_to(cfg.loss.E);
          else if (a == "spa_region") x.get_to(cfg.loss.spa_region);
          else if (a == "exp_region") x.get_to(cfg.loss.exp_region);
          else if (a == "W_col") x.get_to(cfg.loss.W_col);
          else if (a == "W_tv") x.get_to(cfg.loss.W_tv);
          else if (a == "W_spa") x.get_to(cfg.loss.W_spa);
          else if (a == "W_exp") x.get_to(cfg.loss.W_exp);
          else return false;
          return true;
        });
      } else if (k == "optimizer") {
        take(v, "optimizer.", [&](const std::string& a, const json& x) {
          if (a == "lr") x.get_to(cfg.optimizer.lr);
          else if (a == "beta1") x.get_to(cfg.optimizer.beta1);
          else if (a == "beta2") x.get_to(cfg.optimizer.beta2);
          else if (a == "eps") x.get_to(cfg.optimizer.eps);
          else return false;
          return true;
        });
      } else {
        return false;
      }
      return true;
    });
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

TrainConfig load_train_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in)
    throw IoError("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_train_config(ss.str());
}

std::string to_json(const TrainConfig& cfg) {
  json j = {
      {"data_dir", cfg.data_dir},
      {"image_size", cfg.image_size},
      {"batch_size", cfg.batch_size},
      {"max_steps", cfg.max_steps},
      {"seed", cfg.seed},
      {"checkpoint_every", cfg.checkpoint_every},
      {"checkpoint_dir", cfg.checkpoint_dir},
      {"val_fraction", cfg.val_fraction},
      {"synthetic_images", cfg.synthetic_images},
      {"degrade", cfg.degrade},
      {"gamma_min", cfg.gamma_min},
      {"gamma_max", cfg.gamma_max},
      {"arch",
       {{"depth", cfg.arch.depth},
        {"width", cfg.arch.width},
        {"n_iter", cfg.arch.n_iter}}},
      {"loss",
       {{"E", cfg.loss.E},
        {"spa_region", cfg.loss.spa_region},
        {"exp_region", cfg.loss.exp_region},
        {"W_col", cfg.loss.W_col},
        {"W_tv", cfg.loss.W_tv},
        {"W_spa", cfg.loss.W_spa},
        {"W_exp", cfg.loss.W_exp}}},
      {"optimizer",
       {{"lr", cfg.optimizer.lr},
        {"beta1", cfg.optimizer.beta1},
        {"beta2", cfg.optimizer.beta2},
        {"eps", cfg.optimizer.eps}}},
  };
  return j.dump(2);
}

std::vector<Tensor> load_dataset(const fs::path& dir, int size,
                                 std::ostream* warnings) {
  if (size < 1)
    throw ConfigError("image size must be >= 1");
  std::error_code ec;
  if (!fs::is_directory(dir, ec))
    throw IoError("not a directory: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file())
      files.push_back(entry.path());
  std::sort(files.begin(), files.end(),
            [](const fs::path& a, const fs::path& b) {
              return a.filename() < b.filename();
            });

  const int count = static_cast<int>(files.size());
  std::vector<Tensor> decoded(count);
  std::vector<std::string> errors(count);
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < count; ++i) {
    try {
      decoded[i] = resize_bilinear(to_tensor(read_image(files[i])), size, size);
    } catch (const Error& e) {
      errors[i] = e.what();
    }
  }
  std::vector<Tensor> images;
  for (int i = 0; i < count; ++i) {
    if (!errors[i].empty()) {
      if (warnings)
        *warnings << "warning: skipping " << files[i].string() << ": "
                  << errors[i] << "\n";
      continue;
    }
    images.push_back(std::move(decoded[i]));
  }
  if (images.empty())
    throw IoError("no decodable images in " + dir.string());
  return images;
}

Tensor apply_gamma(const Tensor& image, double gamma) {
  Tensor out(image.shape());
  for (std::size_t i = 0; i < image.size(); ++i)
    out[i] = static_cast<Real>(std::pow(static_cast<double>(image[i]), gamma));
  return out;
}

Tensor synth_degrade(const Tensor& image, std::uint64_t seed, double gamma_min,
                     double gamma_max) {
  std::mt19937_64 rng(seed);
  const double gamma = gamma_min + (gamma_max - gamma_min) * unit_uniform(rng);
  return apply_gamma(image, gamma);
}

Tensor synth_scene(int size, std::uint64_t seed) {
  if (size < 1)
    throw ConfigError("scene size must be >= 1");
  std::mt19937_64 rng(seed);
  auto u = [&rng](double lo, double hi) {
    return lo + (hi - lo) * unit_uniform(rng);
  };
  struct Blob {
    double cx, cy, radius;
    double colour[3];
  };
  double base[3], gx[3], gy[3];
  for (int c = 0; c < 3; ++c) {
    base[c] = u(0.35, 0.65);
    gx[c] = u(-0.25, 0.25);
    gy[c] = u(-0.25, 0.25);
  }
  std::vector<Blob> blobs(4 + rng() % 4);
  for (Blob& b : blobs) {
    b.cx = u(0, 1);
    b.cy = u(0, 1);
    b.radius = u(0.08, 0.3);
    for (double& c : b.colour)
      c = u(-0.3, 0.3);
  }
  const double freq = u(4.0, 12.0);
  const double phase = u(0.0, 6.283185307179586);

  Tensor img(Shape{1, 3, size, size});
  for (int y = 0; y < size; ++y)
    for (int x = 0; x < size; ++x) {
      const double fx = (x + 0.5) / size, fy = (y + 0.5) / size;
      const double texture =
          0.04 * std::sin(freq * 6.283185307179586 * (fx + 0.7 * fy) + phase);
      for (int c = 0; c < 3; ++c) {
        double v = base[c] + gx[c] * (fx - 0.5) + gy[c] * (fy - 0.5) + texture;
        for (const Blob& b : blobs) {
          const double d2 = (fx - b.cx) * (fx - b.cx) + (fy - b.cy) * (fy - b.cy);
          v += b.colour[c] * std::exp(-d2 / (2 * b.radius * b.radius));
        }
        img.at(0, c, y, x) = static_cast<Real>(std::clamp(v, 0.02, 0.98));
      }
    }
  return img;
}

std::vector<Tensor> build_dataset(const TrainConfig& cfg,
                                  std::ostream* warnings) {
  std::vector<Tensor> images;
  if (cfg.synthetic_images > 0) {
    for (int i = 0; i < cfg.synthetic_images; ++i)
      images.push_back(
          synth_scene(cfg.image_size, mix(cfg.seed, kSceneStream, i)));
  } else {
    if (cfg.data_dir.empty())
      throw ConfigError("either data_dir or synthetic_images is required");
    images = load_dataset(cfg.data_dir, cfg.image_size, warnings);
  }
  if (cfg.degrade)
    for (std::size_t i = 0; i < images.size(); ++i)
      images[i] = synth_degrade(images[i], mix(cfg.seed, kDegradeStream, i),
                                cfg.gamma_min, cfg.gamma_max);
  return images;
}

std::vector<int> seeded_permutation(int n, std::uint64_t seed) {
  std::vector<int> p(std::max(n, 0));
  for (int i = 0; i < n; ++i)
    p[i] = i;
  std::mt19937_64 rng(seed);
  for (int i = n - 1; i > 0; --i) {
    const int j = static_cast<int>(rng() % static_cast<std::uint64_t>(i + 1));
    std::swap(p[i], p[j]);
  }
  return p;
}

TrainResult train(const TrainConfig& cfg, std::vector<Tensor> images,
                  std::ostream* log) {
  cfg.validate();
  if (images.empty())
    throw ConfigError("training set is empty");
  const Shape item = images.front().shape();
  for (const Tensor& img : images)
    if (img.shape() != item || item.n != 1 || item.c != 3)
      throw ShapeError("training images must all be (1, 3, S, S); got " +
                       img.shape().str());

  // Held-out split.
  const int count = static_cast<int>(images.size());
  const std::vector<int> split =
      seeded_permutation(count, mix(cfg.seed, kSplitStream, 0));
  const int n_val = std::min(
      count - 1, static_cast<int>(std::floor(cfg.val_fraction * count)));
  std::vector<Tensor> train_set, val_set;
  for (int i = 0; i < count; ++i)
    (i < n_val ? val_set : train_set).push_back(std::move(images[split[i]]));

  TrainResult result;
  Checkpoint& ckpt = result.checkpoint;
  ckpt.weights = init_weights(cfg.arch, cfg.seed);
  ckpt.adam = AdamState::fresh(ckpt.weights, cfg.optimizer);
  GradRecord grads = GradRecord::zeros_like(ckpt.weights);

  const int n_train = static_cast<int>(train_set.size());
  std::vector<int> order;
  std::size_t cursor = 0;
  std::uint64_t epoch = 0;
  std::deque<LossBreakdown> window;

  auto next_batch = [&] {
    std::vector<int> idx;
    while (static_cast<int>(idx.size()) < cfg.batch_size) {
      if (cursor == order.size()) {
        order = seeded_permutation(n_train,
                                   mix(cfg.seed, kEpochStream, epoch++));
        cursor = 0;
      }
      idx.push_back(order[cursor++]);
    }
    return idx;
  };

  auto save = [&](const std::string& name) {
    if (!cfg.checkpoint_dir.empty())
      save_checkpoint(ckpt, fs::path(cfg.checkpoint_dir) / name);
  };

  for (int step = 1; step <= cfg.max_steps; ++step) {
    const std::vector<int> idx = next_batch();
    grads.zero();

    Tape tape;
    const BoundWeights bound = bind(tape, ckpt.weights, &grads);
    Var input = tape.constant(stack(train_set, idx));
    Var maps = forward(tape, bound, input);
    Var enhanced = apply_curves(tape, input, maps, cfg.arch.n_iter);
    const LossVars lv =
        total_loss(tape, enhanced, input, maps, cfg.arch.n_iter, cfg.loss);
    const LossBreakdown b = lv.values(tape);

    if (!finite(b)) {
      std::ostringstream msg;
      msg << "non-finite loss at step " << step << " (batch images";
      for (int i : idx)
        msg << " " << i;
      msg << "): l_spa=" << b.l_spa << " l_exp=" << b.l_exp
          << " l_col=" << b.l_col << " l_tv=" << b.l_tv
          << " total=" << b.total;
      throw NonFiniteLossError(msg.str());
    }

    tape.backward(lv.total);
    adam_step(ckpt.weights, grads, ckpt.adam);

    result.history.push_back(b);
    window.push_back(b);
    if (window.size() > kRunningWindow)
      window.pop_front();
    ckpt.step = static_cast<std::uint64_t>(step);
    ckpt.running = average(window);
    if (log)
      *log << step << "\t" << format_breakdown(b) << "\n";

    if (cfg.checkpoint_every > 0 && step % cfg.checkpoint_every == 0) {
      char name[32];
      std::snprintf(name, sizeof name, "step_%06d.zdce", step);
      save(name);
      if (!val_set.empty())
        result.validation.emplace_back(
            step, evaluate(ckpt.weights, val_set, cfg.loss));
    }
  }
  save("final.zdce");
  return result;
}

TrainResult train(const TrainConfig& cfg, std::ostream* log,
                  std::ostream* warnings) {
  cfg.validate();
  return train(cfg, build_dataset(cfg, warnings), log);
}

} // namespace zdce
