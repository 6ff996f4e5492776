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

#include <doctest.h>

#include <random>
#include <sstream>

#include "kgnmt/common/error.hpp"
#include "kgnmt/kb/label_index.hpp"
#include "kgnmt/kb/lexicon.hpp"
#include "kgnmt/kb/ntriples.hpp"
#include "kgnmt/kb/records.hpp"

using namespace kgnmt;
using namespace kgnmt::kb;

namespace {

const char* kDbr = "http://dbpedia.org/resource/";
const char* kDbo = "http://dbpedia.org/ontology/";

std::string iri(const std::string& s) { return "<" + s + ">"; }

std::string label_line(const std::string& subject, const std::string& text,
                       const std::string& lang) {
  return iri(subject) + " <http://www.w3.org/2000/01/rdf-schema#label> \"" + text + "\"@" +
         lang + " .\n";
}

std::string rel_line(const std::string& s, const std::string& r, const std::string& o) {
  return iri(s) + " " + iri(r) + " " + iri(o) + " .\n";
}

}  // namespace

TEST_SUITE("kb") {
  TEST_CASE("parse the NAACL triple") {
    const auto kb = parse_ntriples(std::string_view(
        "<http://dbpedia.org/resource/NAACL> <http://dbpedia.org/ontology/areaServed> "
        "<http://dbpedia.org/resource/North_America> .\n"));
    REQUIRE(kb.size() == 1);
    const Triple& t = kb.triples()[0];
    CHECK(t.subject.value == "http://dbpedia.org/resource/NAACL");
    CHECK(t.relation.value == "http://dbpedia.org/ontology/areaServed");
    REQUIRE(t.object_is_iri());
    CHECK(t.object_iri().value == "http://dbpedia.org/resource/North_America");
    CHECK(kb.entity_count() == 2);
    CHECK(kb.relation_count() == 1);
  }

  TEST_CASE("empty input") {
    const auto kb = parse_ntriples(std::string_view(""));
    CHECK(kb.size() == 0);
    CHECK(kb.entity_count() == 0);
    CHECK(kb.relation_count() == 0);
  }

  TEST_CASE("missing terminal dot reports the line") {
    const std::string text = rel_line("a:x", "a:r", "a:y") + "<a:x> <a:r> <a:z>\n";
    try {
      parse_ntriples(std::string_view(text));
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.line() == 2);
      CHECK(e.column() >= 1);
    }
  }

  TEST_CASE("literal escapes and language tags") {
    const auto kb = parse_ntriples(std::string_view(
        "<a:x> <a:p> \"say \\\"hi\\\"\\n\\tand \\\\ bye\"@EN .\n"
        "<a:x> <a:q> \"42\"^^<http://www.w3.org/2001/XMLSchema#integer> .\n"
        "# comment\n\n"
        "_:b1 <a:p> <a:x> .\n"));
    REQUIRE(kb.size() == 3);
    const auto& lit = kb.triples()[0].object_literal();
    CHECK(lit.text == "say \"hi\"\n\tand \\ bye");
    CHECK(lit.lang == "en");
    CHECK(kb.triples()[1].object_literal().datatype ==
          "http://www.w3.org/2001/XMLSchema#integer");
    CHECK(kb.triples()[2].subject.is_blank());
  }

  TEST_CASE("invalid UTF-8 is an encoding error") {
    std::string text = "<a:x> <a:p> \"bad \xff\" .\n";
    CHECK_THROWS_AS(parse_ntriples(std::string_view(text)), EncodingError);
  }

  TEST_CASE("malformed statements") {
    for (const char* bad : {"<a:x> <a:p> .\n", "\"lit\" <a:p> <a:y> .\n", "<a:x> \"p\" <a:y> .\n",
                            "<a:x <a:p> <a:y> .\n", "<a:x> <a:p> \"open .\n",
                            "<a:x> <a:p> <a:y> . junk\n"}) {
      CAPTURE(bad);
      CHECK_THROWS_AS(parse_ntriples(std::string_view(bad)), ParseError);
    }
  }

  TEST_CASE("line length limit") {
    ParseLimits limits;
    limits.max_line_length = 10;
    CHECK_THROWS_AS(parse_ntriples(std::string_view(rel_line("a:x", "a:p", "a:y")), limits),
                    ParseError);
  }

  TEST_CASE("round trip and recount properties on random graphs") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 50; ++trial) {
      std::string text;
      const int n = std::uniform_int_distribution<int>(0, 30)(rng);
      std::map<std::string, int> ents, rels;
      for (int i = 0; i < n; ++i) {
        const std::string s = "e:" + std::to_string(rng() % 8);
        const std::string r = "r:" + std::to_string(rng() % 3);
        if (rng() % 3 == 0) {
          text += iri(s) + " " + iri(r) + " \"v\\\"" + std::to_string(rng() % 5) + "\\n\"@de .\n";
          ents[s]++;
        } else {
          const std::string o = "e:" + std::to_string(rng() % 8);
          text += rel_line(s, r, o);
          ents[s]++;
          ents[o]++;
        }
        rels[r]++;
      }
      const auto kb = parse_ntriples(std::string_view(text));
      CHECK(kb.size() == static_cast<std::size_t>(n));
      CHECK(kb.entity_count() == ents.size());
      CHECK(kb.relation_count() == rels.size());
      std::ostringstream out;
      write_ntriples(out, kb);
      const auto again = parse_ntriples(std::string_view(out.str()));
      CHECK(again == kb);
    }
  }

  TEST_CASE("label index examples") {
    std::string text = label_line(std::string(kDbr) + "Cancer", "cancer", "en");
    auto kb = parse_ntriples(std::string_view(text));
    auto index = build_label_index(kb);
    auto hits = index.lookup("cancer");
    REQUIRE(hits.size() == 1);
    CHECK(hits[0].entity == std::string(kDbr) + "Cancer");
    CHECK(hits[0].prior == 1);

    CHECK(build_label_index(parse_ntriples(std::string_view(
                                rel_line("a:x", "a:p", "a:y"))))
              .empty());
  }

  TEST_CASE("two entities labeled kiwi ordered by prior then IRI") {
    const std::string bird = std::string(kDbr) + "Kiwi";
    const std::string people = std::string(kDbr) + "Kiwi_(people)";
    const std::string fruit = std::string(kDbr) + "Kiwifruit";
    std::string text = label_line(bird, "Kiwi", "en") + label_line(people, "kiwi", "en") +
                       label_line(fruit, "KIWI", "en") +
                       rel_line(people, std::string(kDbo) + "country",
                                std::string(kDbr) + "New_Zealand") +
                       rel_line(bird, std::string(kDbo) + "class", std::string(kDbr) + "Bird");
    const auto index = build_label_index(parse_ntriples(std::string_view(text)));
    const auto hits = index.lookup("  Kiwi ");
    REQUIRE(hits.size() == 3);
    // priors: bird 2, people 2, fruit 1 -> bird before people by IRI.
    CHECK(hits[0] == Candidate{bird, 2});
    CHECK(hits[1] == Candidate{people, 2});
    CHECK(hits[2] == Candidate{fruit, 1});
  }

  TEST_CASE("every label is reachable through the index") {
    std::string text;
    for (int i = 0; i < 20; ++i) {
      text += label_line("e:" + std::to_string(i), "Name  " + std::to_string(i % 7), "en");
    }
    const auto kb = parse_ntriples(std::string_view(text));
    const auto index = build_label_index(kb);
    for (const auto& t : kb) {
      const auto hits = index.lookup(t.object_literal().text);
      bool found = false;
      for (const auto& c : hits) found = found || c.entity == t.subject.value;
      CHECK(found);
    }
  }

  TEST_CASE("bilingual lexicon via sameAs") {
    const std::string en = std::string(kDbr) + "Cancer";
    const std::string de = "http://de.dbpedia.org/resource/Krebs_(Medizin)";
    const auto src = parse_ntriples(std::string_view(
        label_line(en, "cancer", "en") +
        rel_line(en, "http://www.w3.org/2002/07/owl#sameAs", de)));
    const auto tgt = parse_ntriples(std::string_view(label_line(de, "Krebs", "de")));
    const auto res = extract_bilingual_lexicon(src, tgt);
    REQUIRE(res.lexicon.find("cancer"));
    CHECK(res.lexicon.find("cancer")->contains("Krebs"));
    CHECK(res.lexicon.translate("cancer") == std::optional<std::string>("Krebs"));
    CHECK(res.skipped.empty());
  }

  TEST_CASE("lexicon without sameAs is empty") {
    const auto src = parse_ntriples(std::string_view(label_line("e:a", "a", "en")));
    const auto tgt = parse_ntriples(std::string_view(label_line("d:a", "a", "de")));
    CHECK(extract_bilingual_lexicon(src, tgt).lexicon.empty());
  }

  TEST_CASE("one source entity linked to two targets unions both label sets") {
    const std::string same = "http://www.w3.org/2002/07/owl#sameAs";
    const auto src = parse_ntriples(std::string_view(
        label_line("e:x", "x", "en") + rel_line("e:x", same, "d:1") + rel_line("e:x", same, "d:2")));
    const auto tgt = parse_ntriples(std::string_view(label_line("d:1", "eins", "de") +
                                                     label_line("d:2", "zwei", "de")));
    const auto res = extract_bilingual_lexicon(src, tgt);
    REQUIRE(res.lexicon.find("x"));
    CHECK(*res.lexicon.find("x") == std::set<std::string>{"eins", "zwei"});
  }

  TEST_CASE("dangling sameAs target is skipped and reported") {
    const std::string same = "http://www.w3.org/2002/07/owl#sameAs";
    const auto src = parse_ntriples(
        std::string_view(label_line("e:x", "x", "en") + rel_line("e:x", same, "d:none")));
    const auto tgt = parse_ntriples(std::string_view(label_line("d:1", "eins", "de")));
    const auto res = extract_bilingual_lexicon(src, tgt);
    CHECK(res.lexicon.empty());
    REQUIRE(res.skipped.size() == 1);
    std::ostringstream out;
    write_skip_report(out, res.skipped);
    CHECK(out.str().starts_with("skip\te:x\td:none\t"));
  }

  TEST_CASE("lexicon file round trip") {
    BilingualLexicon lex;
    lex.add("cancer", "Krebs");
    lex.add("cancer", "Karzinom");
    lex.add("kiwi", "Kiwi");
    std::ostringstream out;
    write_lexicon(out, lex);
    std::istringstream in(out.str());
    const auto back = read_lexicon(in);
    CHECK(back.entries() == lex.entries());
  }

  TEST_CASE("structure records for the NAACL triple") {
    const std::string naacl = std::string(kDbr) + "NAACL";
    const std::string na = std::string(kDbr) + "North_America";
    const std::string area = std::string(kDbo) + "areaServed";
    const auto kb = parse_ntriples(std::string_view(rel_line(naacl, area, na)));
    const auto recs = triples_to_records(kb, KgeMode::structure, 50);
    REQUIRE(recs.size() == 2);
    CHECK(recs.records[0] == KgeRecord{{naacl, area}, na});
    CHECK(recs.records[1] == KgeRecord{{na, area}, naacl});
  }

  TEST_CASE("semantic label record") {
    const std::string naacl = std::string(kDbr) + "NAACL";
    const auto kb = parse_ntriples(std::string_view(label_line(
        naacl, "North American Chapter of the Association for Computational Linguistics", "en")));
    const auto recs = triples_to_records(kb, KgeMode::semantic, 50);
    REQUIRE(recs.size() == 1);
    CHECK(recs.records[0].label == naacl);
    CHECK(recs.records[0].features ==
          std::vector<std::string>{"north", "american", "chapter", "of", "the", "association",
                                   "for", "computational", "linguistics"});
  }

  TEST_CASE("semantic bags append labels and truncate them first") {
    const auto kb = parse_ntriples(std::string_view(
        label_line("e:x", "alpha beta gamma", "en") + rel_line("e:x", "r:p", "e:y")));
    const auto full = triples_to_records(kb, KgeMode::semantic, 50);
    REQUIRE(full.size() == 3);
    CHECK(full.records[0] == KgeRecord{{"alpha", "beta", "gamma"}, "e:x"});
    CHECK(full.records[1] == KgeRecord{{"e:x", "r:p", "alpha", "beta", "gamma"}, "e:y"});
    CHECK(full.records[2] == KgeRecord{{"e:y", "r:p"}, "e:x"});
    const auto cut = triples_to_records(kb, KgeMode::semantic, 3);
    CHECK(cut.records[1] == KgeRecord{{"e:x", "r:p", "alpha"}, "e:y"});
  }

  TEST_CASE("structure record count is twice the IRI-object triples") {
    std::mt19937_64 rng(3);
    std::string text;
    int iri_objects = 0;
    for (int i = 0; i < 40; ++i) {
      if (rng() % 4 == 0) {
        text += label_line("e:" + std::to_string(rng() % 9), "w", "en");
      } else {
        text += rel_line("e:" + std::to_string(rng() % 9), "r:a", "e:" + std::to_string(rng() % 9));
        ++iri_objects;
      }
    }
    const auto kb = parse_ntriples(std::string_view(text));
    CHECK(triples_to_records(kb, KgeMode::structure, 50).size() ==
          static_cast<std::size_t>(2 * iri_objects));
  }

  TEST_CASE("semantic mode without labels warns") {
    const auto kb = parse_ntriples(std::string_view(rel_line("e:x", "r:p", "e:y")));
    const auto recs = triples_to_records(kb, KgeMode::semantic, 50);
    CHECK(recs.size() == 2);
    CHECK(recs.warnings.size() == 1);
  }

  TEST_CASE("record preconditions") {
    CHECK_THROWS(triples_to_records(TripleSet{}, KgeMode::structure, 50));
    const auto kb = parse_ntriples(std::string_view(rel_line("e:x", "r:p", "e:y")));
    CHECK_THROWS_AS(triples_to_records(kb, KgeMode::structure, 1), ConfigError);
  }

  TEST_CASE("record file round trip and tokens are whitespace free") {
    const auto kb = parse_ntriples(std::string_view(
        label_line("e:x", "two words", "en") + rel_line("e:x", "r:p", "e:y")));
    const auto recs = triples_to_records(kb, KgeMode::semantic, 50);
    for (const auto& r : recs.records) {
      for (const auto& f : r.features) CHECK(f.find_first_of(" \t") == std::string::npos);
    }
    std::ostringstream out;
    write_records(out, recs);
    std::istringstream in(out.str());
    CHECK(read_records(in).records == recs.records);
  }

  TEST_CASE("linked-data naming separates the two knowledge bases") {
    const auto tgt = parse_ntriples(std::string_view(label_line("http://de.x/Krebs", "Krebs", "de")));
    const auto namer = linked_data_namer(tgt, "dbr_", "dbr_de_");
    CHECK(namer.entity(std::string(kDbr) + "Cancer") == "dbr_Cancer");
    CHECK(namer.entity("http://de.x/Krebs") == "dbr_de_Krebs");
    CHECK(namer.relation(std::string(kDbo) + "areaServed") == "rel_areaServed");
    CHECK(uri_token("http://x/Krebs_(Medizin)", "dbr_") == "dbr_Krebs_(Medizin)");
    CHECK(uri_token("http://x/Caf\xc3\xa9", "dbr_") == "dbr_Caf%C3%A9");
  }
}
