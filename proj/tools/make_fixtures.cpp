// Copyright (c) scenectx contributors.
// SPDX-License-Identifier: Apache-2.0
//
// Regenerates the observation streams under data/streams.
//
//   make_fixtures <out-dir>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>

#include "support/synth.hpp"

namespace fs = std::filesystem;
using namespace scenectx;

namespace {

constexpr double kSpacing = 0.03;
constexpr double kNoise = 0.002;
constexpr std::size_t kPointsPerFrame = 400;

bool write_stream(const fs::path& path, std::vector<synth::SynthObject> objects, unsigned seed) {
  std::mt19937_64 rng(seed);
  for (auto& o : objects) {
    synth::perturb(o, kNoise, 0.0, rng);
    for (LabeledObservation& obs : o.observations) {
      obs.position = (obs.position * 1e4).array().round() / 1e4;
      for (int k = 0; k < 3; ++k) {
        if (std::abs(obs.normal[k]) < 1e-12) obs.normal[k] = 0.0;
      }
    }
  }
  std::ofstream out(path, std::ios::binary);
  out << synth::stream_text(synth::frames_from(objects, kPointsPerFrame));
  if (!out) {
    std::cerr << "make_fixtures: cannot write " << path << '\n';
    return false;
  }
  std::cout << path.string() << '\n';
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: make_fixtures <out-dir>\n";
    return 2;
  }
  const fs::path dir = argv[1];
  fs::create_directories(dir);
  bool ok = true;
  ok &= write_stream(dir / "living_room.jsonl", synth::living_room(true, kSpacing), 1);
  ok &= write_stream(dir / "living_room_tv_behind.jsonl", synth::living_room(false, kSpacing), 2);
  ok &= write_stream(dir / "lounge.jsonl", synth::lounge(kSpacing), 3);
  return ok ? 0 : 1;
}
