// Copyright 2026 The kgnmt Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef KGNMT_PIPELINE_SYNTHETIC_HPP_
#define KGNMT_PIPELINE_SYNTHETIC_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "kgnmt/el/linker.hpp"
#include "kgnmt/eval/metrics.hpp"
#include "kgnmt/kb/triple_set.hpp"

namespace kgnmt::pipeline {

// A bilingual toy world: typed entities with English and German names,
// mirrored relations in two knowledge bases joined by sameAs, and a parallel
// corpus produced from reordering templates with entity slots. Held-out
// entities never occur in training sentences; every test sentence mentions
// exactly one of them.
struct SyntheticOptions {
  int entities = 500;
  int held_out = 50;
  int train_pairs = 4800;
  int test_pairs = 200;
  // Fraction of entities whose German name equals the English one.
  double shared_names = 0.0;
  std::uint64_t seed = 7;
};

struct SyntheticEntity {
  std::string cls;  // ontology class local name
  std::string en;
  std::string de;
  bool held_out = false;
};

struct SyntheticData {
  std::vector<SyntheticEntity> entities;
  kb::TripleSet kb_en;
  kb::TripleSet kb_de;
  el::ParallelCorpus train;
  el::ParallelCorpus test;
  std::vector<eval::EntityTest> test_entities;
};

inline constexpr std::string_view kSynthEnResource = "http://en.example.org/resource/";
inline constexpr std::string_view kSynthDeResource = "http://de.example.org/resource/";
inline constexpr std::string_view kSynthOntology = "http://dbpedia.org/ontology/";

SyntheticData generate_synthetic(const SyntheticOptions& options);

// Writes kb.en.nt, kb.de.nt, train.{en,de}, test.{en,de} and
// test.entities into dir (created if missing).
void write_synthetic(const std::string& dir, const SyntheticData& data);

}  // namespace kgnmt::pipeline

#endif  // KGNMT_PIPELINE_SYNTHETIC_HPP_
