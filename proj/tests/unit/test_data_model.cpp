// Copyright 2026 The semdvc Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "oracles.h"
#include "semdvc/dataset.h"
#include "semdvc/errors.h"
#include "semdvc/synthetic.h"
#include "semdvc/tensor_file.h"
#include "semdvc/text.h"

using namespace semdvc;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void put_bytes(const fs::path& p, const std::string& bytes) {
  std::ofstream out(p, std::ios::binary);
  out << bytes;
}

std::string u32(std::uint32_t v) {
  std::string s(4, '\0');
  for (int i = 0; i < 4; ++i) s[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  return s;
}

VideoRecord one_video_record() {
  VideoRecord r;
  r.id = "v1";
  r.duration = 10.0;
  r.modality_names = {"rgb"};
  r.features = {Matrix(10, 3, 0.5f)};
  r.events = {{{1.0, 4.0}, {"apply", "blush"}, {0}}, {{5.0, 9.0}, {"apply", "lipstick"}, {1}}};
  return r;
}

}  // namespace

TEST_SUITE("data_model") {
  TEST_CASE("tensor file round trip of a 3x4 matrix") {
    const auto dir = oracle::scratch_dir("tensor");
    Matrix m(3, 4);
    for (std::size_t i = 0; i < m.data.size(); ++i) m.data[i] = static_cast<float>(i) * 0.25f - 1.0f;
    write_matrix(dir / "m.dvct", m);
    CHECK(read_matrix(dir / "m.dvct") == m);
    // header 4 + 4 + 2*4 then 12 floats
    CHECK(fs::file_size(dir / "m.dvct") == 16 + 48);
    fs::remove_all(dir);
  }

  TEST_CASE("tensor file rejects bad magic") {
    const auto dir = oracle::scratch_dir("magic");
    put_bytes(dir / "bad.dvct", "XXXX" + u32(1) + u32(1) + std::string(4, '\0'));
    CHECK_THROWS_AS(read_tensor(dir / "bad.dvct"), FormatError);
    fs::remove_all(dir);
  }

  TEST_CASE("tensor file with a short payload reports truncation") {
    const auto dir = oracle::scratch_dir("trunc");
    put_bytes(dir / "short.dvct", "DVCT" + u32(2) + u32(2) + u32(2) + std::string(12, '\0'));
    try {
      read_tensor(dir / "short.dvct");
      FAIL("expected a format error");
    } catch (const FormatError& e) {
      CHECK(std::string(e.what()).find("truncated") != std::string::npos);
      CHECK(std::string(e.what()).find("16") != std::string::npos);
    }
    fs::remove_all(dir);
  }

  TEST_CASE("tensor file with trailing bytes is rejected") {
    const auto dir = oracle::scratch_dir("trail");
    put_bytes(dir / "long.dvct", "DVCT" + u32(1) + u32(1) + std::string(8, '\0'));
    CHECK_THROWS_AS(read_tensor(dir / "long.dvct"), FormatError);
    fs::remove_all(dir);
  }

  TEST_CASE("tokenize splits punctuation and lowercases") {
    CHECK(tokenize("Apply Blush, then BLEND.") == Tokens{"apply", "blush", ",", "then", "blend", "."});
    CHECK(tokenize("   ").empty());
  }

  TEST_CASE("tokenize and detokenize round trip on normalized text") {
    for (const std::string s : {"apply blush on cheeks", "dab , then blend .", "a"}) {
      CHECK(detokenize(tokenize(s)) == s);
    }
  }

  TEST_CASE("vocabulary from a two caption corpus") {
    VideoRecord r;
    r.events = {{{0, 1}, {"apply", "lipstick"}, {}}, {{1, 2}, {"apply", "blush"}, {}}};
    const auto v = build_text_vocabulary({r}, 1);
    CHECK(v.size() == 7);
    CHECK(v.index_of("<pad>") == 0);
    CHECK(v.index_of("<bos>") == 1);
    CHECK(v.index_of("<eos>") == 2);
    CHECK(v.index_of("<unk>") == 3);
    for (const auto* w : {"apply", "lipstick", "blush"}) {
      CHECK(v.contains(w));
      CHECK(v.token_at(v.index_of(w)) == w);
    }
    // frequency first, then lexicographic
    CHECK(v.token_at(4) == "apply");
    CHECK(v.token_at(5) == "blush");

    const auto v2 = build_text_vocabulary({r}, 2);
    CHECK(v2.size() == 5);
    CHECK(v2.token_at(4) == "apply");
    CHECK(v2.index_of("blush") == TextVocabulary::kUnknown);

    CHECK_THROWS_AS(build_text_vocabulary({r}, 0), ValidationError);
    CHECK_THROWS_AS(build_text_vocabulary({}, 1), ValidationError);
  }

  TEST_CASE("encode appends the end token and truncates") {
    const TextVocabulary v({"apply", "blush"});
    CHECK(v.encode({"apply", "blush"}) == std::vector<std::int64_t>{4, 5, TextVocabulary::kEnd});
    CHECK(v.encode({"apply", "zzz"}) == std::vector<std::int64_t>{4, TextVocabulary::kUnknown, TextVocabulary::kEnd});
    CHECK(v.encode({"apply", "blush", "apply"}, 2).size() == 2);
    CHECK(v.decode({4, 5, TextVocabulary::kEnd, 4}) == Tokens{"apply", "blush"});
    CHECK_THROWS_AS(v.token_at(99), ValidationError);
  }

  TEST_CASE("manifest load sorts events by start time") {
    const auto dir = oracle::scratch_dir("manifest");
    VideoRecord r = one_video_record();
    std::swap(r.events[0], r.events[1]);
    save_dataset(dir, {r});
    const auto loaded = load_dataset(dir / "manifest.json");
    REQUIRE(loaded.size() == 1);
    CHECK(loaded[0].events.size() == 2);
    CHECK(loaded[0].events[0].timestamp.start == 1.0);
    CHECK(loaded[0].events[1].timestamp.start == 5.0);
    CHECK(loaded[0].features[0] == r.features[0]);

    const auto gt = load_ground_truth(dir / "manifest.json");
    REQUIRE(gt.size() == 1);
    CHECK(gt[0].events[0].caption == Tokens{"apply", "blush"});
    fs::remove_all(dir);
  }

  TEST_CASE("manifest with start greater than end names the video and event") {
    const auto dir = oracle::scratch_dir("badts");
    save_dataset(dir, {one_video_record()});
    auto j = nlohmann::json::parse(slurp(dir / "manifest.json"));
    j["v1"]["timestamps"][1] = {5.0, 3.0};
    put_bytes(dir / "manifest.json", j.dump());
    try {
      load_dataset(dir / "manifest.json");
      FAIL("expected validation error");
    } catch (const ValidationError& e) {
      const std::string msg = e.what();
      CHECK(msg.find("v1") != std::string::npos);
      CHECK(msg.find("event 1") != std::string::npos);
    }
    fs::remove_all(dir);
  }

  TEST_CASE("differing modality frame counts are rejected") {
    VideoRecord r = one_video_record();
    r.modality_names = {"a", "b"};
    r.features = {Matrix(100, 2), Matrix(98, 2)};
    r.duration = 100.0;
    try {
      validate_record(r);
      FAIL("expected validation error");
    } catch (const ValidationError& e) {
      CHECK(std::string(e.what()).find("modality frame counts differ") != std::string::npos);
    }
  }

  TEST_CASE("missing feature file lists the path") {
    const auto dir = oracle::scratch_dir("missing");
    save_dataset(dir, {one_video_record()});
    fs::remove_all(dir / "features");
    try {
      load_dataset(dir / "manifest.json");
      FAIL("expected io error");
    } catch (const IoError& e) {
      CHECK(std::string(e.what()).find("features") != std::string::npos);
    }
    fs::remove_all(dir);
  }

  TEST_CASE("label range is checked against the label space") {
    VideoRecord r = one_video_record();
    CHECK_NOTHROW(validate_record(r, 2));
    CHECK_THROWS_AS(validate_record(r, 1), ValidationError);
  }

  TEST_CASE("synthetic generation is byte deterministic") {
    const auto a = oracle::scratch_dir("synA");
    const auto b = oracle::scratch_dir("synB");
    SyntheticOptions o;
    o.seed = 7;
    o.num_videos = 4;
    save_synthetic_dataset(a, generate_synthetic_dataset(o));
    save_synthetic_dataset(b, generate_synthetic_dataset(o));
    CHECK(slurp(a / "manifest.json") == slurp(b / "manifest.json"));
    CHECK(slurp(a / "features" / "video_0002.modality_01.dvct") == slurp(b / "features" / "video_0002.modality_01.dvct"));
    CHECK(fs::exists(a / "pos_lexicon.json"));
    CHECK(load_label_space(a / "label_space.json").size() == 8);

    o.seed = 8;
    const auto c = generate_synthetic_dataset(o);
    CHECK_FALSE(c.records == generate_synthetic_dataset({7, 4}).records);
    fs::remove_all(a);
    fs::remove_all(b);
  }

  TEST_CASE("synthetic event count bounds and record invariants") {
    SyntheticOptions o;
    o.num_videos = 20;
    o.max_events = 5;
    const auto ds = generate_synthetic_dataset(o);
    std::size_t total = 0;
    for (const auto& r : ds.records) {
      CHECK_NOTHROW(validate_record(r, ds.label_names.size()));
      CHECK(r.events.size() >= 1);
      CHECK(r.events.size() <= 5);
      total += r.events.size();
    }
    CHECK(total >= 20);
    CHECK(total <= 100);
    o.max_events = 11;
    CHECK_THROWS_AS(generate_synthetic_dataset(o), ValidationError);
  }

  TEST_CASE("synthetic event frames sit far from background frames") {
    SyntheticOptions o;
    o.num_videos = 3;
    const auto ds = generate_synthetic_dataset(o);
    const auto& r = ds.records[0];
    const Matrix& f = r.features[0];
    std::vector<double> bg(f.cols, 0.0), ev(f.cols, 0.0);
    std::size_t nb = 0, ne = 0;
    for (std::size_t t = 0; t < f.rows; ++t) {
      const double mid = t + 0.5;
      bool inside = false;
      for (const auto& e : r.events) inside = inside || (mid >= e.timestamp.start && mid <= e.timestamp.end);
      auto& acc = inside ? ev : bg;
      (inside ? ne : nb) += 1;
      for (std::size_t d = 0; d < f.cols; ++d) acc[d] += f(t, d);
    }
    REQUIRE(nb > 0);
    REQUIRE(ne > 0);
    double dist = 0.0;
    for (std::size_t d = 0; d < f.cols; ++d) dist += std::pow(ev[d] / ne - bg[d] / nb, 2);
    CHECK(std::sqrt(dist) > 3.0 * o.noise_sigma);
  }

  TEST_CASE("pos lexicon round trip") {
    const auto dir = oracle::scratch_dir("lex");
    PosLexicon lex{{"apply", PartOfSpeech::kVerb}, {"blush", PartOfSpeech::kNoun}, {"on", PartOfSpeech::kOther}};
    save_pos_lexicon(dir / "lex.json", lex);
    CHECK(load_pos_lexicon(dir / "lex.json") == lex);
    put_bytes(dir / "bad.json", R"({"apply": "adverb"})");
    CHECK_THROWS_AS(load_pos_lexicon(dir / "bad.json"), FormatError);
    fs::remove_all(dir);
  }
}
