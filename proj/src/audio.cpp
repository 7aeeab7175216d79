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

#include "csteval/audio.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstring>
#include <fstream>
#include <numbers>
#include <stdexcept>

namespace csteval {

namespace {

constexpr int kSincHalfWidth = 32;  // 64-tap kernel
constexpr double kKaiserBeta = 8.6;

double bessel_i0(double x) {
  double sum = 1.0;
  double term = 1.0;
  double half_x = x / 2.0;
  for (int k = 1; k < 64; ++k) {
    term *= (half_x / k) * (half_x / k);
    sum += term;
    if (term < 1e-14 * sum) break;
  }
  return sum;
}

double kaiser(double t_over_half) {
  if (std::abs(t_over_half) >= 1.0) return 0.0;
  return bessel_i0(kKaiserBeta * std::sqrt(1.0 - t_over_half * t_over_half)) /
         bessel_i0(kKaiserBeta);
}

double sinc(double x) {
  if (x == 0.0) return 1.0;
  double px = std::numbers::pi * x;
  return std::sin(px) / px;
}

uint32_t read_u32(const unsigned char* p) {
  return static_cast<uint32_t>(p[0]) | static_cast<uint32_t>(p[1]) << 8 |
         static_cast<uint32_t>(p[2]) << 16 | static_cast<uint32_t>(p[3]) << 24;
}

uint16_t read_u16(const unsigned char* p) {
  return static_cast<uint16_t>(p[0] | p[1] << 8);
}

// In-place iterative radix-2 FFT; size must be a power of two.
void fft(std::vector<std::complex<double>>& a) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    double angle = -2.0 * std::numbers::pi / static_cast<double>(len);
    std::complex<double> wlen(std::cos(angle), std::sin(angle));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        std::complex<double> u = a[i + k];
        std::complex<double> v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
}

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

}  // namespace

AudioClip read_wav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open wav file: " + path);
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw std::runtime_error("not a RIFF/WAVE file: " + path);
  }

  uint16_t format = 0, channels = 0, bits = 0;
  uint32_t rate = 0;
  const unsigned char* data = nullptr;
  std::size_t data_size = 0;

  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const unsigned char* chunk = bytes.data() + pos;
    uint32_t chunk_size = read_u32(chunk + 4);
    std::size_t body = pos + 8;
    if (body + chunk_size > bytes.size()) chunk_size = static_cast<uint32_t>(bytes.size() - body);
    if (std::memcmp(chunk, "fmt ", 4) == 0 && chunk_size >= 16) {
      format = read_u16(chunk + 8);
      channels = read_u16(chunk + 10);
      rate = read_u32(chunk + 12);
      bits = read_u16(chunk + 22);
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      data = chunk + 8;
      data_size = chunk_size;
    }
    pos = body + chunk_size + (chunk_size & 1);  // chunks are word-aligned
  }

  if (rate == 0 || channels == 0) throw std::runtime_error("wav missing fmt chunk: " + path);
  if (data == nullptr) throw std::runtime_error("wav missing data chunk: " + path);
  const bool pcm16 = format == 1 && bits == 16;
  const bool float32 = format == 3 && bits == 32;
  if (!pcm16 && !float32) {
    throw std::runtime_error("unsupported wav encoding (want PCM16 or float32): " + path);
  }

  const std::size_t bytes_per_sample = bits / 8;
  const std::size_t frame_size = bytes_per_sample * channels;
  const std::size_t frames = frame_size > 0 ? data_size / frame_size : 0;

  AudioClip clip;
  clip.sample_rate = static_cast<int>(rate);
  clip.samples.resize(frames);
  for (std::size_t f = 0; f < frames; ++f) {
    double acc = 0.0;
    for (std::size_t c = 0; c < channels; ++c) {
      const unsigned char* s = data + f * frame_size + c * bytes_per_sample;
      if (pcm16) {
        int16_t v = static_cast<int16_t>(read_u16(s));
        acc += static_cast<double>(v) / 32768.0;
      } else {
        float v;
        std::memcpy(&v, s, sizeof(v));
        acc += v;
      }
    }
    clip.samples[f] = static_cast<float>(std::clamp(acc / channels, -1.0, 1.0));
  }
  return clip;
}

std::vector<uint8_t> wav_pcm16_bytes(const AudioClip& clip) {
  if (clip.sample_rate <= 0) {
    throw std::invalid_argument("wav_pcm16_bytes: sample_rate must be > 0");
  }
  std::vector<uint8_t> out;
  out.reserve(44 + clip.samples.size() * 2);
  auto put_bytes = [&out](const char* s, std::size_t n) {
    out.insert(out.end(), s, s + n);
  };
  auto put_u32 = [&out](uint32_t v) {
    out.push_back(static_cast<uint8_t>(v));
    out.push_back(static_cast<uint8_t>(v >> 8));
    out.push_back(static_cast<uint8_t>(v >> 16));
    out.push_back(static_cast<uint8_t>(v >> 24));
  };
  auto put_u16 = [&out](uint16_t v) {
    out.push_back(static_cast<uint8_t>(v));
    out.push_back(static_cast<uint8_t>(v >> 8));
  };

  const uint32_t data_size = static_cast<uint32_t>(clip.samples.size() * 2);
  put_bytes("RIFF", 4);
  put_u32(36 + data_size);
  put_bytes("WAVE", 4);
  put_bytes("fmt ", 4);
  put_u32(16);
  put_u16(1);  // PCM
  put_u16(1);  // mono
  put_u32(static_cast<uint32_t>(clip.sample_rate));
  put_u32(static_cast<uint32_t>(clip.sample_rate) * 2);
  put_u16(2);
  put_u16(16);
  put_bytes("data", 4);
  put_u32(data_size);
  for (float s : clip.samples) {
    double v = std::clamp(static_cast<double>(s), -1.0, 1.0);
    put_u16(static_cast<uint16_t>(static_cast<int16_t>(std::lround(v * 32767.0))));
  }
  return out;
}

void write_wav(const std::string& path, const AudioClip& clip) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot create wav file: " + path);
  std::vector<uint8_t> bytes = wav_pcm16_bytes(clip);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<long>(bytes.size()));
  if (!out) throw std::runtime_error("short write to wav file: " + path);
}

AudioClip resample_audio(const AudioClip& clip, int target_rate) {
  if (clip.sample_rate <= 0) throw std::invalid_argument("resample_audio: source rate must be > 0");
  if (target_rate <= 0) throw std::invalid_argument("resample_audio: target rate must be > 0");
  if (clip.samples.empty()) throw std::invalid_argument("resample_audio: empty sample sequence");
  if (target_rate == clip.sample_rate) return clip;

  const double ratio = static_cast<double>(target_rate) / clip.sample_rate;
  const double cutoff = std::min(1.0, ratio);  // anti-alias on downsample
  const double support = kSincHalfWidth / cutoff;
  const std::size_t out_len =
      static_cast<std::size_t>(std::llround(static_cast<double>(clip.samples.size()) * ratio));

  AudioClip out;
  out.sample_rate = target_rate;
  out.origin = clip.origin;
  out.samples.resize(out_len);

  const auto n_in = static_cast<long>(clip.samples.size());
  for (std::size_t n = 0; n < out_len; ++n) {
    const double t = static_cast<double>(n) / ratio;  // position in input samples
    const long k_lo = static_cast<long>(std::ceil(t - support));
    const long k_hi = static_cast<long>(std::floor(t + support));
    double acc = 0.0;
    double norm = 0.0;
    for (long k = k_lo; k <= k_hi; ++k) {
      const double d = (static_cast<double>(k) - t) * cutoff;
      const double w = cutoff * sinc(d) * kaiser(d / kSincHalfWidth);
      norm += w;
      if (k >= 0 && k < n_in) acc += w * clip.samples[static_cast<std::size_t>(k)];
    }
    out.samples[n] = static_cast<float>(norm != 0.0 ? acc / norm : 0.0);
  }
  return out;
}

std::vector<AudioClip> segment_audio(const AudioClip& clip) {
  if (clip.sample_rate != kPipelineSampleRate) {
    throw std::invalid_argument("segment_audio: expected 16 kHz input");
  }
  const std::size_t window = static_cast<std::size_t>(kClipSeconds * kPipelineSampleRate);
  const std::size_t n_clips = (clip.samples.size() + window - 1) / window;

  std::vector<AudioClip> clips;
  clips.reserve(n_clips);
  for (std::size_t i = 0; i < n_clips; ++i) {
    AudioClip c;
    c.sample_rate = kPipelineSampleRate;
    c.origin.segment_id = clip.origin.segment_id;
    c.origin.clip_index = static_cast<int>(i);
    c.origin.start_offset_s = static_cast<double>(i) * kClipSeconds;
    const std::size_t begin = i * window;
    const std::size_t end = std::min(begin + window, clip.samples.size());
    c.samples.assign(clip.samples.begin() + begin, clip.samples.begin() + end);
    c.samples.resize(window, 0.0f);  // zero-pad the tail
    clips.push_back(std::move(c));
  }
  return clips;
}

MelSpectrogram mel_spectrogram(const AudioClip& clip, const MelConfig& config) {
  if (config.window_samples <= 0 || config.hop_samples <= 0 || config.mel_bins <= 0) {
    throw std::invalid_argument("mel_spectrogram: window, hop and mel_bins must be > 0");
  }
  if (config.hop_samples > config.window_samples) {
    throw std::invalid_argument("mel_spectrogram: hop must not exceed window");
  }
  if (config.sample_rate <= 0) throw std::invalid_argument("mel_spectrogram: bad sample rate");

  std::size_t n_fft = 1;
  while (n_fft < static_cast<std::size_t>(config.window_samples)) n_fft <<= 1;
  const std::size_t n_bins = n_fft / 2 + 1;
  const int window = config.window_samples;
  const int half = window / 2;
  const long n = static_cast<long>(clip.samples.size());

  // Periodic Hann window.
  std::vector<double> hann(static_cast<std::size_t>(window));
  for (int i = 0; i < window; ++i) {
    hann[static_cast<std::size_t>(i)] =
        0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * i / window));
  }

  // Triangular mel filterbank over the FFT bin frequencies.
  const double mel_max = hz_to_mel(config.sample_rate / 2.0);
  std::vector<double> mel_points(static_cast<std::size_t>(config.mel_bins) + 2);
  for (std::size_t i = 0; i < mel_points.size(); ++i) {
    mel_points[i] = mel_to_hz(mel_max * static_cast<double>(i) / (config.mel_bins + 1));
  }
  std::vector<std::vector<double>> filterbank(
      static_cast<std::size_t>(config.mel_bins), std::vector<double>(n_bins, 0.0));
  for (int b = 0; b < config.mel_bins; ++b) {
    const double left = mel_points[static_cast<std::size_t>(b)];
    const double center = mel_points[static_cast<std::size_t>(b) + 1];
    const double right = mel_points[static_cast<std::size_t>(b) + 2];
    for (std::size_t i = 0; i < n_bins; ++i) {
      const double f = static_cast<double>(i) * config.sample_rate / static_cast<double>(n_fft);
      double w = 0.0;
      if (f > left && f < center) {
        w = (f - left) / (center - left);
      } else if (f == center) {
        w = 1.0;
      } else if (f > center && f < right) {
        w = (right - f) / (right - center);
      }
      filterbank[static_cast<std::size_t>(b)][i] = w;
    }
  }

  const std::size_t n_frames = clip.samples.size() / static_cast<std::size_t>(config.hop_samples);
  MelSpectrogram mel;
  mel.config = config;
  mel.data.assign(n_frames, std::vector<double>(static_cast<std::size_t>(config.mel_bins), 0.0));

  std::vector<std::complex<double>> buf(n_fft);
  std::vector<double> power(n_bins);
  for (std::size_t frame = 0; frame < n_frames; ++frame) {
    const long center = static_cast<long>(frame) * config.hop_samples;
    std::fill(buf.begin(), buf.end(), std::complex<double>(0.0));
    for (int i = 0; i < window; ++i) {
      long idx = center - half + i;
      // Reflect at the clip boundaries.
      if (idx < 0) idx = -idx;
      if (idx >= n) idx = 2 * n - 2 - idx;
      const double s = (idx >= 0 && idx < n) ? clip.samples[static_cast<std::size_t>(idx)] : 0.0;
      buf[static_cast<std::size_t>(i)] = s * hann[static_cast<std::size_t>(i)];
    }
    fft(buf);
    for (std::size_t i = 0; i < n_bins; ++i) power[i] = std::norm(buf[i]);
    for (int b = 0; b < config.mel_bins; ++b) {
      double acc = 0.0;
      const std::vector<double>& fb = filterbank[static_cast<std::size_t>(b)];
      for (std::size_t i = 0; i < n_bins; ++i) acc += fb[i] * power[i];
      mel.data[frame][static_cast<std::size_t>(b)] = 10.0 * std::log10(std::max(acc, 1e-10));
    }
  }

  // Clamp to dynamic_range_db below the global maximum.
  double peak = -1e30;
  for (const auto& row : mel.data)
    for (double v : row) peak = std::max(peak, v);
  if (!mel.data.empty()) {
    const double floor_db = peak - config.dynamic_range_db;
    for (auto& row : mel.data)
      for (double& v : row) v = std::max(v, floor_db);
  }
  return mel;
}

double mel_bin_center_hz(const MelConfig& config, int bin) {
  if (bin < 0 || bin >= config.mel_bins) throw std::out_of_range("mel bin out of range");
  const double mel_max = hz_to_mel(config.sample_rate / 2.0);
  return mel_to_hz(mel_max * static_cast<double>(bin + 1) / (config.mel_bins + 1));
}

}  // namespace csteval
