// tests/test_wav_io.cpp

// Copyright 2026  The seval authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <cstdint>
#include <fstream>

#include "seval/resample.hpp"
#include "seval/wav_io.hpp"
#include "test_util.hpp"

using namespace seval;
using namespace seval::testing;

namespace {

void put_u16(std::string& s, std::uint16_t v) {
  s.push_back(static_cast<char>(v & 0xFF));
  s.push_back(static_cast<char>((v >> 8) & 0xFF));
}

void put_u32(std::string& s, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) s.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

// Hand-rolled WAV bytes, independent of the writer under test.
std::string raw_wav(std::uint16_t format, std::uint16_t channels,
                    std::uint32_t rate, std::uint16_t bits,
                    const std::string& data, int truncate_data_by = 0) {
  std::string s = "RIFF";
  const std::uint32_t data_size = static_cast<std::uint32_t>(data.size());
  put_u32(s, 36 + data_size);
  s += "WAVEfmt ";
  put_u32(s, 16);
  put_u16(s, format);
  put_u16(s, channels);
  put_u32(s, rate);
  put_u32(s, rate * channels * bits / 8);
  put_u16(s, static_cast<std::uint16_t>(channels * bits / 8));
  put_u16(s, bits);
  s += "data";
  put_u32(s, data_size);
  s += data.substr(0, data.size() - static_cast<std::size_t>(truncate_data_by));
  return s;
}

void write_bytes(const std::string& path, const std::string& bytes) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  os << bytes;
}

}  // namespace

TEST_SUITE("wav_io") {

TEST_CASE("pcm16 mono load honors the format contract") {
  TempDir tmp("wav_pcm16");
  std::string data;
  put_u16(data, 0x4000);   // +0.5
  put_u16(data, 0xC000);   // -0.5
  put_u16(data, 0x0000);
  write_bytes(tmp.str("a.wav"), raw_wav(1, 1, 16000, 16, data));

  auto [w, meta] = load_wav(tmp.str("a.wav"));
  CHECK(w.sample_rate_hz == 16000);
  CHECK(w.size() == 3);
  CHECK(w.samples[0] == doctest::Approx(0.5));
  CHECK(w.samples[1] == doctest::Approx(-0.5));
  CHECK(meta.channels == 1);
  CHECK(meta.encoding == SampleEncoding::kPcm16);
  CHECK(meta.duration_s == doctest::Approx(3.0 / 16000));
}

TEST_CASE("10 s 16 kHz pcm16 file yields 160000 samples") {
  TempDir tmp("wav_len");
  const Waveform tone = make_tone(440.0, 16000, 10.0, 0.4);
  REQUIRE(tone.size() == 160000);
  save_wav(tone, tmp.str("t.wav"), SampleEncoding::kPcm16);
  auto [w, meta] = load_wav(tmp.str("t.wav"));
  CHECK(w.size() == 160000);
  CHECK(w.sample_rate_hz == 16000);
}

TEST_CASE("float32 stereo is mean-downmixed") {
  TempDir tmp("wav_stereo");
  std::string data;
  auto put_f32 = [&](float f) {
    std::uint32_t u;
    std::memcpy(&u, &f, 4);
    put_u32(data, u);
  };
  put_f32(0.5f);   // frame 0 ch 0
  put_f32(-0.25f); // frame 0 ch 1
  put_f32(1.0f);
  put_f32(1.0f);
  write_bytes(tmp.str("st.wav"), raw_wav(3, 2, 48000, 32, data));

  auto [w, meta] = load_wav(tmp.str("st.wav"));
  CHECK(meta.channels == 2);
  CHECK(w.size() == 2);
  CHECK(w.samples[0] == doctest::Approx(0.125));
  CHECK(w.samples[1] == doctest::Approx(1.0));
  CHECK(w.samples.abs().maxCoeff() <= 1.0 + 1e-6);
}

TEST_CASE("truncated data chunk is MalformedFile") {
  TempDir tmp("wav_trunc");
  std::string data(64, '\0');
  write_bytes(tmp.str("bad.wav"), raw_wav(1, 1, 16000, 16, data, 10));
  try {
    load_wav(tmp.str("bad.wav"));
    FAIL("expected MalformedFile");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kMalformedFile);
  }
}

TEST_CASE("zero-length data chunk is EmptyAudio") {
  TempDir tmp("wav_empty");
  write_bytes(tmp.str("e.wav"), raw_wav(1, 1, 16000, 16, ""));
  CHECK_THROWS_AS(load_wav(tmp.str("e.wav")), Error);
  try {
    load_wav(tmp.str("e.wav"));
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kEmptyAudio);
  }
}

TEST_CASE("pcm8 is UnsupportedEncoding") {
  TempDir tmp("wav_pcm8");
  write_bytes(tmp.str("u.wav"), raw_wav(1, 1, 16000, 8, std::string(16, 'x')));
  try {
    load_wav(tmp.str("u.wav"));
    FAIL("expected UnsupportedEncoding");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kUnsupportedEncoding);
  }
}

TEST_CASE("not a RIFF file is MalformedFile") {
  TempDir tmp("wav_riff");
  write_bytes(tmp.str("x.wav"), "this is not audio at all, sorry");
  try {
    load_wav(tmp.str("x.wav"));
    FAIL("expected MalformedFile");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kMalformedFile);
  }
}

TEST_CASE("encode/decode error is bounded by the quantization step") {
  TempDir tmp("wav_rt");
  Waveform w = make_white_noise(7, 16000, 0.25, 0.3);

  struct Case {
    SampleEncoding enc;
    double bound;
  };
  for (const Case c : {Case{SampleEncoding::kFloat32, 1e-7},
                       Case{SampleEncoding::kPcm16, std::pow(2.0, -15)},
                       Case{SampleEncoding::kPcm24, std::pow(2.0, -23)},
                       Case{SampleEncoding::kPcm32, std::pow(2.0, -30)}}) {
    const std::string path = tmp.str("rt.wav");
    const Index clipped = save_wav(w, path, c.enc);
    CHECK(clipped == 0);
    auto [back, meta] = load_wav(path);
    CHECK(meta.encoding == c.enc);
    REQUIRE(back.size() == w.size());
    CHECK((back.samples - w.samples).abs().maxCoeff() <= c.bound);
  }
}

TEST_CASE("clipping on save is counted, not fatal") {
  TempDir tmp("wav_clip");
  Vec x(4);
  x << 0.5, 1.5, -2.0, 0.1;
  const Index clipped =
      save_wav(Waveform(x, 8000), tmp.str("c.wav"), SampleEncoding::kPcm16);
  CHECK(clipped == 2);
  auto [w, meta] = load_wav(tmp.str("c.wav"));
  CHECK(w.samples.abs().maxCoeff() <= 1.0);
}

TEST_CASE("unwritable path is IoError") {
  const Waveform w = make_tone(440.0, 16000, 0.05);
  try {
    save_wav(w, "/nonexistent_dir_zzz/out.wav", SampleEncoding::kPcm16);
    FAIL("expected IoError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kIoError);
  }
}

TEST_CASE("gain_normalize hits the target RMS level") {
  Waveform w = make_tone(300.0, 16000, 0.5, 0.9, false);
  // scale to exactly -15 dBFS RMS first
  w.samples *= db_to_linear(-15.0) / rms(w.samples);
  const Waveform out = gain_normalize(w, -25.0);
  CHECK(rms_dbfs(out.samples) == doctest::Approx(-25.0).epsilon(1e-6));
  CHECK(std::abs(rms_dbfs(out.samples) + 25.0) < 0.01);
}

TEST_CASE("gain_normalize is scale invariant and idempotent") {
  const Waveform w = make_speech_like(3, 16000, 0.5);
  Waveform doubled(w.samples * 2.0, w.sample_rate_hz);
  const Waveform a = gain_normalize(w);
  const Waveform b = gain_normalize(doubled);
  CHECK((a.samples - b.samples).abs().maxCoeff() < 1e-9);
  const Waveform twice = gain_normalize(a);
  CHECK((twice.samples - a.samples).abs().maxCoeff() < 1e-9);
}

TEST_CASE("gain_normalize rejects silence") {
  Vec zeros = Vec::Zero(1600);
  try {
    gain_normalize(Waveform(zeros, 16000));
    FAIL("expected SilentInput");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kSilentInput);
  }
}

}  // TEST_SUITE
