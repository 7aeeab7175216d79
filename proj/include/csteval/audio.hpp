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

#ifndef CSTEVAL_AUDIO_HPP_
#define CSTEVAL_AUDIO_HPP_

#include <cstdint>
#include <string>
#include <vector>

namespace csteval {

struct ClipOrigin {
  std::string segment_id;
  int clip_index = 0;
  double start_offset_s = 0.0;
};

struct AudioClip {
  std::vector<float> samples;  // amplitudes in [-1, 1]
  int sample_rate = 0;
  ClipOrigin origin;

  double duration_s() const {
    return sample_rate > 0 ? static_cast<double>(samples.size()) / sample_rate : 0.0;
  }
};

struct MelConfig {
  int window_samples = 400;  // 25 ms at 16 kHz
  int hop_samples = 160;     // 10 ms
  int mel_bins = 80;
  int sample_rate = 16000;
  double dynamic_range_db = 80.0;

  bool operator==(const MelConfig&) const = default;
};

struct MelSpectrogram {
  // frames x mel_bins, dB values clamped to dynamic_range_db below the max.
  std::vector<std::vector<double>> data;
  MelConfig config;

  std::size_t frames() const { return data.size(); }
  std::size_t bins() const { return data.empty() ? 0 : data.front().size(); }
};

inline constexpr int kPipelineSampleRate = 16000;
inline constexpr double kClipSeconds = 30.0;

// Mono WAV, PCM16 or float32; multi-channel input is averaged down to mono.
AudioClip read_wav(const std::string& path);
void write_wav(const std::string& path, const AudioClip& clip);
// RIFF/PCM16 mono serialization of the clip, as written by write_wav.
std::vector<uint8_t> wav_pcm16_bytes(const AudioClip& clip);

// Band-limited resampling with a 64-tap Kaiser-windowed sinc kernel.
AudioClip resample_audio(const AudioClip& clip, int target_rate);

// Consecutive non-overlapping 30 s windows; the last one is zero-padded.
std::vector<AudioClip> segment_audio(const AudioClip& clip);

MelSpectrogram mel_spectrogram(const AudioClip& clip, const MelConfig& config = {});

// Triangular filterbank center frequency of a mel bin, exposed for callers
// that need to reason about where energy should land.
double mel_bin_center_hz(const MelConfig& config, int bin);

}  // namespace csteval

#endif  // CSTEVAL_AUDIO_HPP_
