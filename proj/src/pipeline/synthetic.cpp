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

#include "kgnmt/pipeline/synthetic.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>

#include "kgnmt/common/error.hpp"
#include "kgnmt/common/text.hpp"
#include "kgnmt/kb/ntriples.hpp"

namespace kgnmt::pipeline {

namespace {

constexpr std::string_view kRdfType = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";

struct Template {
  const char* en;
  const char* de;
};

// Slots: P and Q persons, C city, K country, O organisation, R river.
const std::vector<Template>& templates() {
  static const std::vector<Template> t = {
      {"{P} was born in {C} .", "{P} wurde in {C} geboren ."},
      {"{P} works for {O} .", "{P} arbeitet für {O} ."},
      {"{C} is a city in {K} .", "{C} ist eine Stadt in {K} ."},
      {"the {R} flows through {K} .", "der {R} fließt durch {K} ."},
      {"{O} is located in {C} .", "{O} befindet sich in {C} ."},
      {"yesterday {P} visited {C} .", "gestern besuchte {P} {C} ."},
      {"{P} lives in {K} .", "{P} lebt in {K} ."},
      {"the river {R} is very long .", "der Fluss {R} ist sehr lang ."},
      {"{P} met {Q} in {C} .", "{P} traf {Q} in {C} ."},
      {"we know that {P} likes {K} .", "wir wissen , dass {P} {K} mag ."},
      {"{O} has an office in {K} .", "{O} hat ein Büro in {K} ."},
      {"after the war {P} moved to {C} .", "nach dem Krieg zog {P} nach {C} ."},
  };
  return t;
}

const std::vector<std::string>& classes() {
  static const std::vector<std::string> c = {"Person", "City", "Country", "Organisation",
                                             "River"};
  return c;
}

std::string slot_class(char slot) {
  switch (slot) {
    case 'P':
    case 'Q': return "Person";
    case 'C': return "City";
    case 'K': return "Country";
    case 'O': return "Organisation";
    case 'R': return "River";
  }
  throw Error(std::string("synthetic: unknown slot ") + slot);
}

// (relation, object class) pairs per subject class.
const std::map<std::string, std::vector<std::pair<std::string, std::string>>>& relations() {
  static const std::map<std::string, std::vector<std::pair<std::string, std::string>>> r = {
      {"Person",
       {{"birthPlace", "City"}, {"nationality", "Country"}, {"employer", "Organisation"},
        {"knows", "Person"}}},
      {"City", {{"country", "Country"}, {"twinTown", "City"}}},
      {"Organisation", {{"location", "City"}, {"foundedBy", "Person"}}},
      {"River", {{"country", "Country"}, {"mouthPlace", "City"}}},
      {"Country", {{"capital", "City"}, {"neighbour", "Country"}}},
  };
  return r;
}

std::string make_name(std::mt19937_64& rng, bool german) {
  static const std::vector<std::string> en_on = {"b", "d", "f", "g", "k", "l", "m",
                                                 "n", "p", "r", "s", "t", "v"};
  static const std::vector<std::string> en_nuc = {"a", "e", "i", "o", "u"};
  static const std::vector<std::string> en_coda = {"", "", "n", "s", "x", "l"};
  static const std::vector<std::string> de_on = {"b", "d", "g", "h", "k", "l", "m", "n",
                                                 "r", "sch", "st", "w", "z"};
  static const std::vector<std::string> de_nuc = {"a", "ei", "au", "o", "u", "ie", "e"};
  static const std::vector<std::string> de_coda = {"en", "er", "ing", "berg", "heim", "dorf"};
  const auto& on = german ? de_on : en_on;
  const auto& nuc = german ? de_nuc : en_nuc;
  const auto& coda = german ? de_coda : en_coda;
  auto pick = [&](const std::vector<std::string>& v) {
    return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
  };
  const int syllables = std::uniform_int_distribution<int>(2, 3)(rng);
  std::string out;
  for (int i = 0; i < syllables; ++i) out += pick(on) + pick(nuc);
  out += pick(coda);
  out[0] = static_cast<char>(out[0] - 'a' + 'A');
  return out;
}

kb::Triple iri_triple(std::string s, std::string r, std::string o) {
  return {kb::Iri{std::move(s)}, kb::Iri{std::move(r)}, kb::Iri{std::move(o)}};
}

kb::Triple label_triple(std::string s, std::string text, std::string lang) {
  return {kb::Iri{std::move(s)}, kb::Iri{std::string(kb::kRdfsLabel)},
          kb::Literal{std::move(text), std::move(lang), {}}};
}

Sentence fill(const std::string& pattern, const std::map<char, const SyntheticEntity*>& slots,
              bool german) {
  Sentence out;
  for (const auto& tok : split_ws(pattern)) {
    if (tok.size() == 3 && tok[0] == '{' && tok[2] == '}') {
      const SyntheticEntity* e = slots.at(tok[1]);
      out.push_back(german ? e->de : e->en);
    } else {
      out.push_back(tok);
    }
  }
  return out;
}

std::vector<char> slots_of(const std::string& pattern) {
  std::vector<char> out;
  for (const auto& tok : split_ws(pattern)) {
    if (tok.size() == 3 && tok[0] == '{' && tok[2] == '}') out.push_back(tok[1]);
  }
  return out;
}

}  // namespace

SyntheticData generate_synthetic(const SyntheticOptions& o) {
  const int n_classes = static_cast<int>(classes().size());
  if (o.entities < 2 * n_classes) throw ConfigError("synthetic: need at least 10 entities");
  if (o.held_out < 0 || o.held_out >= o.entities / 2) {
    throw ConfigError("synthetic: held_out must be in [0, entities/2)");
  }
  if (o.train_pairs <= 0 || o.test_pairs < 0) throw ConfigError("synthetic: bad pair counts");
  if (o.held_out == 0 && o.test_pairs > 0) {
    throw ConfigError("synthetic: test sentences need held-out entities");
  }

  std::mt19937_64 rng(o.seed);
  SyntheticData d;

  std::set<std::string> taken;
  for (const auto& t : templates()) {
    for (const auto& w : split_ws(t.en)) taken.insert(lowercase(w));
    for (const auto& w : split_ws(t.de)) taken.insert(lowercase(w));
  }
  auto fresh = [&](bool german) {
    for (;;) {
      std::string n = make_name(rng, german);
      if (taken.insert(lowercase(n)).second) return n;
    }
  };
  std::bernoulli_distribution shared(o.shared_names);
  for (int i = 0; i < o.entities; ++i) {
    SyntheticEntity e;
    e.cls = classes()[static_cast<std::size_t>(i % n_classes)];
    e.en = fresh(false);
    e.de = shared(rng) ? e.en : fresh(true);
    d.entities.push_back(std::move(e));
  }
  // Held-out entities are spread evenly over the classes.
  for (int i = 0; i < o.held_out; ++i) {
    d.entities[static_cast<std::size_t>(o.entities - 1 - i)].held_out = true;
  }

  std::map<std::string, std::vector<std::size_t>> by_class;
  std::map<std::string, std::vector<std::size_t>> train_by_class;
  std::map<std::string, std::vector<std::size_t>> held_by_class;
  for (std::size_t i = 0; i < d.entities.size(); ++i) {
    const auto& e = d.entities[i];
    by_class[e.cls].push_back(i);
    (e.held_out ? held_by_class : train_by_class)[e.cls].push_back(i);
  }

  // Knowledge bases: the same facts in both languages.
  auto en_iri = [&](std::size_t i) { return std::string(kSynthEnResource) + d.entities[i].en; };
  auto de_iri = [&](std::size_t i) { return std::string(kSynthDeResource) + d.entities[i].de; };
  const std::string onto(kSynthOntology);
  for (std::size_t i = 0; i < d.entities.size(); ++i) {
    const auto& e = d.entities[i];
    d.kb_en.add(iri_triple(en_iri(i), std::string(kRdfType), onto + e.cls));
    d.kb_de.add(iri_triple(de_iri(i), std::string(kRdfType), onto + e.cls));
    d.kb_en.add(label_triple(en_iri(i), e.en, "en"));
    d.kb_de.add(label_triple(de_iri(i), e.de, "de"));
    d.kb_en.add(iri_triple(en_iri(i), std::string(kb::kOwlSameAs), de_iri(i)));
    for (const auto& [rel, cls] : relations().at(e.cls)) {
      const auto& pool = by_class.at(cls);
      const std::size_t j = pool[std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng)];
      d.kb_en.add(iri_triple(en_iri(i), onto + rel, en_iri(j)));
      d.kb_de.add(iri_triple(de_iri(i), onto + rel, de_iri(j)));
    }
  }

  // Zipf-like entity frequencies within each class.
  std::map<std::string, std::discrete_distribution<std::size_t>> zipf;
  for (auto& [cls, pool] : train_by_class) {
    std::shuffle(pool.begin(), pool.end(), rng);
    std::vector<double> w(pool.size());
    for (std::size_t r = 0; r < w.size(); ++r) w[r] = 1.0 / static_cast<double>(r + 1);
    zipf.emplace(cls, std::discrete_distribution<std::size_t>(w.begin(), w.end()));
  }
  auto draw_train = [&](const std::string& cls, const std::set<std::size_t>& avoid) {
    for (;;) {
      const std::size_t i = train_by_class.at(cls)[zipf.at(cls)(rng)];
      if (!avoid.contains(i)) return i;
    }
  };

  const auto& tpl = templates();
  std::uniform_int_distribution<std::size_t> pick_tpl(0, tpl.size() - 1);
  auto sentence = [&](const Template& t, std::map<char, const SyntheticEntity*> slots,
                      el::ParallelCorpus& out) {
    std::set<std::size_t> used;
    for (const auto& [s, e] : slots) used.insert(static_cast<std::size_t>(e - d.entities.data()));
    for (char s : slots_of(t.en)) {
      if (slots.contains(s)) continue;
      const std::size_t i = draw_train(slot_class(s), used);
      used.insert(i);
      slots[s] = &d.entities[i];
    }
    out.source.push_back(fill(t.en, slots, false));
    out.target.push_back(fill(t.de, slots, true));
  };

  for (int p = 0; p < o.train_pairs; ++p) sentence(tpl[pick_tpl(rng)], {}, d.train);

  std::vector<std::size_t> held;
  for (std::size_t i = 0; i < d.entities.size(); ++i) {
    if (d.entities[i].held_out) held.push_back(i);
  }
  for (int p = 0; p < o.test_pairs; ++p) {
    const std::size_t h = held[static_cast<std::size_t>(p) % held.size()];
    const SyntheticEntity& e = d.entities[h];
    std::vector<std::pair<const Template*, char>> options;
    for (const auto& t : tpl) {
      for (char s : slots_of(t.en)) {
        if (slot_class(s) == e.cls) options.emplace_back(&t, s);
      }
    }
    const auto& [t, slot] =
        options[std::uniform_int_distribution<std::size_t>(0, options.size() - 1)(rng)];
    sentence(*t, {{slot, &e}}, d.test);
    d.test_entities.push_back({d.test.target.size() - 1, e.de});
  }
  return d;
}

void write_synthetic(const std::string& dir, const SyntheticData& data) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path base(dir);
  auto write_kb = [&](const char* name, const kb::TripleSet& kb) {
    std::ofstream out(base / name, std::ios::binary);
    if (!out) throw Error("cannot write " + (base / name).string());
    kb::write_ntriples(out, kb);
  };
  write_kb("kb.en.nt", data.kb_en);
  write_kb("kb.de.nt", data.kb_de);
  write_corpus((base / "train.en").string(), data.train.source);
  write_corpus((base / "train.de").string(), data.train.target);
  write_corpus((base / "test.en").string(), data.test.source);
  write_corpus((base / "test.de").string(), data.test.target);
  std::ofstream ent(base / "test.entities", std::ios::binary);
  if (!ent) throw Error("cannot write " + (base / "test.entities").string());
  eval::write_entity_tests(ent, data.test_entities);
}

}  // namespace kgnmt::pipeline
