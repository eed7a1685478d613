// Copyright 2026 The dishlog Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "dishlog/dataset.hpp"
#include "dishlog/detect_io.hpp"
#include "oracles.hpp"

namespace dishlog {
namespace {

using testing::Rng;

ClassRegistry registry() {
  std::vector<std::string> names;
  for (int i = 0; i < 61; ++i) names.push_back("dish_" + std::to_string(i));
  return ClassRegistry(names);
}

void BM_ParseLabels(benchmark::State& state) {
  Rng rng(11);
  ImageRecord rec{"im", {}};
  for (int i = 0; i < state.range(0); ++i) {
    rec.boxes.push_back({static_cast<ClassId>(rng.index(61)), testing::random_box(rng)});
  }
  const auto text = serialize_yolo_label(rec);
  const auto reg = registry();
  for (auto _ : state) benchmark::DoNotOptimize(parse_yolo_label_file("im", text, reg));
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(text.size()));
}
BENCHMARK(BM_ParseLabels)->Arg(10)->Arg(1000);

void BM_ParseDetections(benchmark::State& state) {
  Rng rng(12);
  DetectionSet set{"im", {}, ""};
  for (int i = 0; i < state.range(0); ++i) {
    set.predictions.push_back({static_cast<ClassId>(rng.index(61)), rng.uniform(0, 1), testing::random_box(rng)});
  }
  const auto text = serialize_detection_file(set);
  const auto reg = registry();
  for (auto _ : state) benchmark::DoNotOptimize(parse_detection_file("im", text, reg));
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(text.size()));
}
BENCHMARK(BM_ParseDetections)->Arg(10)->Arg(1000);

void BM_StubDetect(benchmark::State& state) {
  Rng rng(13);
  const auto ds = testing::random_dataset(rng, 61, 1000, 8);
  const DetectorConfig cfg{0.1, 0.05, 0.05, 7};
  for (auto _ : state) {
    for (const auto& im : ds.images()) benchmark::DoNotOptimize(stub_detect(im, cfg, 61));
  }
  state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_StubDetect);

}  // namespace
}  // namespace dishlog
