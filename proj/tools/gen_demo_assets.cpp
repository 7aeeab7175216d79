// Copyright 2026 The csteval Authors
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

// Regenerates the bundled demo assets: the two demo tokenizer models and
// the 20-segment synthetic fixture corpus with its audio files. Run from
// the repository root; pass an alternative root as argv[1].

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "csteval/audio.hpp"
#include "csteval/corpus.hpp"
#include "csteval/tokenizer.hpp"

namespace {

using namespace csteval;

const std::vector<std::string> kTokenizerTrainingText = {
    "أنا أحب التفاح",
    "i love apples",
};

TokenizerModel build_char_fallback() { return train_char_model(kTokenizerTrainingText); }

// Hand-picked merges that stop short of whole words, so the Arabic demo
// sentence splits into the five pieces the comparison table shows.
TokenizerModel build_arabic_bpe() {
  TokenizerModel model = train_char_model(kTokenizerTrainingText);
  model.add_merge("أ", "ن", false);
  model.add_merge("أن", "ا", true);
  model.add_merge("أ", "ح", false);
  model.add_merge("ا", "ل", false);
  model.add_merge("ال", "ت", false);
  model.add_merge("الت", "ف", false);
  model.add_merge("ا", "ح", true);
  return model;
}

struct FixtureRow {
  const char* id;
  const char* split;
  const char* source_cs;
  const char* ref_en;
  const char* ref_ar;
  bool has_audio;
};

// 20 segments: 14 train + 6 test, 18 with audio. Sources mix Arabic and
// English inside one utterance; two rows are monolingual controls.
const FixtureRow kFixture[] = {
    {"fx-001", "test", "انا رايح el meeting دلوقتي", "I am going to the meeting now",
     "انا رايح الاجتماع دلوقتي", true},
    {"fx-002", "test", "ال project ده محتاج وقت", "This project needs time",
     "المشروع ده محتاج وقت", true},
    {"fx-003", "test", "هنعمل call بكرة الصبح", "We will have a call tomorrow morning",
     "هنعمل مكالمة بكرة الصبح", true},
    {"fx-004", "test", "ابعتلي ال report على الايميل", "Send me the report by email",
     "ابعتلي التقرير على الايميل", true},
    {"fx-005", "test", "العرض كان very good فعلا", "The presentation was very good indeed",
     "العرض كان كويس جدا فعلا", true},
    {"fx-006", "test", "محتاجين نراجع ال budget تاني", "We need to review the budget again",
     "محتاجين نراجع الميزانية تاني", false},
    {"fx-007", "train", "انا مشغول في ال deadline بتاع السنة", "I am busy with the yearly deadline",
     "انا مشغول في الموعد النهائي بتاع السنة", true},
    {"fx-008", "train", "ال team اشتغل كويس اوي", "The team worked very well",
     "الفريق اشتغل كويس اوي", true},
    {"fx-009", "train", "هات ال laptop من المكتب", "Get the laptop from the office",
     "هات الكمبيوتر من المكتب", true},
    {"fx-010", "train", "احنا هنسافر يوم ال weekend", "We travel on the weekend",
     "احنا هنسافر يوم الاجازة", true},
    {"fx-011", "train", "قابلت صاحبي في ال mall امبارح", "I met my friend at the mall yesterday",
     "قابلت صاحبي في السوق امبارح", true},
    {"fx-012", "train", "ال interview كان صعب شوية", "The interview was a bit hard",
     "المقابلة كانت صعبة شوية", true},
    {"fx-013", "train", "عايز اشرب coffee الاول", "I want to drink coffee first",
     "عايز اشرب قهوة الاول", true},
    {"fx-014", "train", "ال traffic النهارده مش طبيعي", "The traffic today is not normal",
     "الزحمة النهارده مش طبيعية", true},
    {"fx-015", "train", "نزلت ال update الجديد للتليفون", "I installed the new phone update",
     "نزلت التحديث الجديد للتليفون", true},
    {"fx-016", "train", "الدكتور قال خد break اسبوع", "The doctor said take a week break",
     "الدكتور قال خد راحة اسبوع", true},
    {"fx-017", "train", "الولاد بيلعبوا football تحت", "The kids play football downstairs",
     "الولاد بيلعبوا كورة تحت", true},
    {"fx-018", "train", "اكتب ال summary في صفحة واحدة", "Write the summary in one page",
     "اكتب الملخص في صفحة واحدة", true},
    {"fx-019", "train", "انا اتاخرت عشان الزحمة", "I was late because of the traffic",
     "انا اتاخرت عشان الزحمة", true},
    {"fx-020", "train", "thanks a lot يا جماعة", "Thanks a lot everyone",
     "شكرا جدا يا جماعة", false},
};

AudioClip fixture_tone(std::size_t index) {
  AudioClip clip;
  clip.sample_rate = kPipelineSampleRate;
  const double freq = 300.0 + 40.0 * static_cast<double>(index);
  const double seconds = 0.35 + 0.05 * static_cast<double>(index % 4);
  const std::size_t n = static_cast<std::size_t>(seconds * kPipelineSampleRate);
  clip.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    clip.samples[i] = static_cast<float>(
        0.4 * std::sin(2.0 * M_PI * freq * static_cast<double>(i) / kPipelineSampleRate));
  }
  return clip;
}

}  // namespace

int main(int argc, char** argv) {
  std::filesystem::path root = argc > 1 ? argv[1] : ".";
  std::filesystem::create_directories(root / "data" / "tokenizers");
  std::filesystem::create_directories(root / "data" / "fixtures" / "audio");

  save_tokenizer(build_char_fallback(), (root / "data" / "tokenizers" / "char_fallback.json").string());
  save_tokenizer(build_arabic_bpe(), (root / "data" / "tokenizers" / "arabic_bpe.json").string());

  std::vector<Segment> segments;
  std::size_t index = 0;
  for (const FixtureRow& row : kFixture) {
    Segment segment;
    segment.id = row.id;
    segment.split = split_from_string(row.split);
    segment.source_cs = row.source_cs;
    segment.ref_en = std::string(row.ref_en);
    segment.ref_ar = std::string(row.ref_ar);
    if (row.has_audio) {
      AudioClip clip = fixture_tone(index);
      std::string rel = std::string("audio/") + row.id + ".wav";
      write_wav((root / "data" / "fixtures" / rel).string(), clip);
      segment.audio = AudioRef{rel, clip.duration_s()};
    }
    segments.push_back(std::move(segment));
    ++index;
  }
  Corpus corpus("fixture", "synthetic demo corpus", std::move(segments));
  save_corpus(corpus, (root / "data" / "fixtures" / "corpus.jsonl").string(),
              CorpusFormat::kJsonl);

  std::printf("wrote %zu fixture segments and 2 tokenizer models\n",
              static_cast<std::size_t>(std::size(kFixture)));
  return 0;
}
