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

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <string>
#include <vector>

#include "csteval/audio.hpp"
#include "doctest.h"

using namespace csteval;

namespace {

AudioClip sine_clip(double freq, double seconds, int rate, double amplitude = 0.5) {
  AudioClip clip;
  clip.sample_rate = rate;
  clip.samples.resize(static_cast<std::size_t>(seconds * rate));
  for (std::size_t i = 0; i < clip.samples.size(); ++i) {
    clip.samples[i] = static_cast<float>(
        amplitude * std::sin(2.0 * std::numbers::pi * freq * static_cast<double>(i) / rate));
  }
  return clip;
}

std::filesystem::path temp_wav(const char* name) {
  return std::filesystem::temp_directory_path() / name;
}

}  // namespace

TEST_CASE("wav round trip within pcm16 quantization") {
  AudioClip clip = sine_clip(440.0, 0.05, 16000);
  auto path = temp_wav("csteval_roundtrip.wav");
  write_wav(path.string(), clip);
  AudioClip back = read_wav(path.string());
  REQUIRE(back.sample_rate == clip.sample_rate);
  REQUIRE(back.samples.size() == clip.samples.size());
  for (std::size_t i = 0; i < clip.samples.size(); ++i) {
    CHECK(std::abs(back.samples[i] - clip.samples[i]) < 1e-4);
  }
  std::filesystem::remove(path);
}

TEST_CASE("wav_pcm16_bytes matches the file written by write_wav") {
  AudioClip clip = sine_clip(100.0, 0.01, 8000);
  auto path = temp_wav("csteval_bytes.wav");
  write_wav(path.string(), clip);
  std::ifstream in(path, std::ios::binary);
  std::vector<uint8_t> file_bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  CHECK(file_bytes == wav_pcm16_bytes(clip));
  std::filesystem::remove(path);
}

TEST_CASE("stereo pcm16 input is averaged to mono") {
  // Hand-built 2-channel file with two frames: (+0.5, -0.5) and
  // (+0.25, +0.25).
  std::vector<uint8_t> bytes;
  auto u32 = [&bytes](uint32_t v) {
    for (int i = 0; i < 4; ++i) bytes.push_back(static_cast<uint8_t>(v >> (8 * i)));
  };
  auto u16 = [&bytes](uint16_t v) {
    bytes.push_back(static_cast<uint8_t>(v));
    bytes.push_back(static_cast<uint8_t>(v >> 8));
  };
  auto tag = [&bytes](const char* s) { bytes.insert(bytes.end(), s, s + 4); };
  tag("RIFF");
  u32(36 + 8);
  tag("WAVE");
  tag("fmt ");
  u32(16);
  u16(1);      // PCM
  u16(2);      // stereo
  u32(16000);
  u32(16000 * 4);
  u16(4);
  u16(16);
  tag("data");
  u32(8);
  u16(static_cast<uint16_t>(16384));   // L = +0.5
  u16(static_cast<uint16_t>(-16384));  // R = -0.5
  u16(static_cast<uint16_t>(8192));    // L = +0.25
  u16(static_cast<uint16_t>(8192));    // R = +0.25
  auto path = temp_wav("csteval_stereo.wav");
  {
    std::ofstream out(path, std::ios::binary);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<long>(bytes.size()));
  }
  AudioClip clip = read_wav(path.string());
  REQUIRE(clip.samples.size() == 2);
  CHECK(clip.sample_rate == 16000);
  CHECK(std::abs(clip.samples[0]) < 1e-6);
  CHECK(std::abs(clip.samples[1] - 0.25f) < 1e-3);
  std::filesystem::remove(path);
}

TEST_CASE("malformed wav files are rejected") {
  auto path = temp_wav("csteval_bad.wav");
  {
    std::ofstream out(path, std::ios::binary);
    out << "RIFFxxxxWAVE";  // headers only, no chunks
  }
  CHECK_THROWS(read_wav(path.string()));
  {
    std::ofstream out(path, std::ios::binary);
    out << "not a wav at all";
  }
  CHECK_THROWS(read_wav(path.string()));
  CHECK_THROWS(read_wav((path.string() + ".does-not-exist")));
  std::filesystem::remove(path);
}

TEST_CASE("downsampled sine matches the analytic waveform") {
  AudioClip source = sine_clip(440.0, 1.0, 44100);
  AudioClip out = resample_audio(source, 16000);
  CHECK(out.sample_rate == 16000);
  CHECK(out.samples.size() == 16000);
  // Skip one kernel width at each edge where the signal is genuinely
  // truncated; everywhere else the resampler must track the analytic sine.
  for (std::size_t n = 100; n + 100 < out.samples.size(); ++n) {
    double expected = 0.5 * std::sin(2.0 * std::numbers::pi * 440.0 *
                                     static_cast<double>(n) / 16000.0);
    CHECK(std::abs(out.samples[n] - expected) < 1e-3);
  }
}

TEST_CASE("upsampled sine matches the analytic waveform") {
  AudioClip source = sine_clip(440.0, 0.5, 8000);
  AudioClip out = resample_audio(source, 16000);
  CHECK(out.samples.size() == 8000);
  for (std::size_t n = 100; n + 100 < out.samples.size(); ++n) {
    double expected = 0.5 * std::sin(2.0 * std::numbers::pi * 440.0 *
                                     static_cast<double>(n) / 16000.0);
    CHECK(std::abs(out.samples[n] - expected) < 1e-3);
  }
}

TEST_CASE("same-rate resampling is the identity") {
  AudioClip source = sine_clip(200.0, 0.1, 16000);
  AudioClip out = resample_audio(source, 16000);
  CHECK(out.samples == source.samples);
}

TEST_CASE("segmentation cuts 30 s windows and pads the tail") {
  const std::size_t window = static_cast<std::size_t>(kClipSeconds * kPipelineSampleRate);
  AudioClip clip = sine_clip(5.0, 75.0, kPipelineSampleRate);
  clip.origin.segment_id = "seg-1";
  std::vector<AudioClip> clips = segment_audio(clip);
  REQUIRE(clips.size() == 3);
  for (std::size_t i = 0; i < clips.size(); ++i) {
    CHECK(clips[i].samples.size() == window);
    CHECK(clips[i].origin.segment_id == "seg-1");
    CHECK(clips[i].origin.clip_index == static_cast<int>(i));
    CHECK(clips[i].origin.start_offset_s == doctest::Approx(30.0 * static_cast<double>(i)));
  }
  // First two windows are verbatim copies; the last 15 s are zero padding.
  CHECK(clips[0].samples[1234] == clip.samples[1234]);
  CHECK(clips[1].samples[0] == clip.samples[window]);
  for (std::size_t i = window / 2; i < window; ++i) {
    CHECK(clips[2].samples[i] == 0.0f);
  }

  SUBCASE("short input yields one padded clip") {
    AudioClip small = sine_clip(5.0, 0.2, kPipelineSampleRate);
    std::vector<AudioClip> one = segment_audio(small);
    REQUIRE(one.size() == 1);
    CHECK(one[0].samples.size() == window);
  }
  SUBCASE("wrong sample rate is rejected") {
    AudioClip wrong = sine_clip(5.0, 0.2, 8000);
    CHECK_THROWS(segment_audio(wrong));
  }
}

TEST_CASE("thirty seconds at 16 kHz produce a 3000 x 80 mel matrix") {
  AudioClip clip = sine_clip(440.0, 30.0, 16000);
  MelSpectrogram mel = mel_spectrogram(clip);
  CHECK(mel.frames() == 3000);
  CHECK(mel.bins() == 80);
}

TEST_CASE("silence maps to a constant clamped matrix") {
  AudioClip clip;
  clip.sample_rate = 16000;
  clip.samples.assign(16000, 0.0f);
  MelSpectrogram mel = mel_spectrogram(clip);
  REQUIRE(mel.frames() == 100);
  const double v0 = mel.data[0][0];
  for (const auto& row : mel.data) {
    for (double v : row) CHECK(v == doctest::Approx(v0));
  }
}

TEST_CASE("a pure tone concentrates energy near its frequency") {
  AudioClip clip = sine_clip(440.0, 2.0, 16000);
  MelSpectrogram mel = mel_spectrogram(clip);
  // Average energy per bin over all frames; the strongest bin's center
  // frequency must sit next to 440 Hz.
  std::vector<double> mean(mel.bins(), 0.0);
  for (const auto& row : mel.data) {
    for (std::size_t b = 0; b < row.size(); ++b) mean[b] += row[b];
  }
  std::size_t best = 0;
  for (std::size_t b = 1; b < mean.size(); ++b) {
    if (mean[b] > mean[best]) best = b;
  }
  double center = mel_bin_center_hz(mel.config, static_cast<int>(best));
  CHECK(std::abs(center - 440.0) < 120.0);
}

TEST_CASE("mel bin centers increase monotonically") {
  MelConfig config;
  double prev = 0.0;
  for (int b = 0; b < config.mel_bins; ++b) {
    double c = mel_bin_center_hz(config, b);
    CHECK(c > prev);
    prev = c;
  }
  CHECK(prev < config.sample_rate / 2.0);
  CHECK_THROWS(mel_bin_center_hz(config, -1));
  CHECK_THROWS(mel_bin_center_hz(config, config.mel_bins));
}

TEST_CASE("degenerate inputs are rejected") {
  AudioClip clip = sine_clip(100.0, 0.01, 16000);
  CHECK_THROWS(resample_audio(AudioClip{}, 16000));
  CHECK_THROWS(resample_audio(clip, 0));
  MelConfig bad;
  bad.hop_samples = bad.window_samples + 1;
  CHECK_THROWS(mel_spectrogram(clip, bad));
  AudioClip no_rate;
  no_rate.samples.assign(100, 0.0f);
  CHECK_THROWS(wav_pcm16_bytes(no_rate));
}
