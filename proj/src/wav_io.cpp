// seval/wav_io.cpp

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

#include "seval/wav_io.hpp"

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

namespace seval {

namespace {

constexpr std::uint16_t kFormatPcm = 0x0001;
constexpr std::uint16_t kFormatIeeeFloat = 0x0003;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

struct FmtChunk {
  std::uint16_t format = 0;
  std::uint16_t channels = 0;
  std::uint32_t sample_rate = 0;
  std::uint16_t bits_per_sample = 0;
};

std::uint16_t read_u16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t read_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

void write_u16(std::vector<unsigned char>& out, std::uint16_t v) {
  out.push_back(static_cast<unsigned char>(v & 0xFF));
  out.push_back(static_cast<unsigned char>((v >> 8) & 0xFF));
}

void write_u32(std::vector<unsigned char>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i)
    out.push_back(static_cast<unsigned char>((v >> (8 * i)) & 0xFF));
}

double decode_sample(const unsigned char* p, SampleEncoding enc) {
  switch (enc) {
    case SampleEncoding::kPcm16: {
      std::int16_t v = static_cast<std::int16_t>(read_u16(p));
      return static_cast<double>(v) / 32768.0;
    }
    case SampleEncoding::kPcm24: {
      std::int32_t v = static_cast<std::int32_t>(
          (static_cast<std::uint32_t>(p[0]) << 8) |
          (static_cast<std::uint32_t>(p[1]) << 16) |
          (static_cast<std::uint32_t>(p[2]) << 24));
      return static_cast<double>(v >> 8) / 8388608.0;
    }
    case SampleEncoding::kPcm32: {
      std::int32_t v = static_cast<std::int32_t>(read_u32(p));
      return static_cast<double>(v) / 2147483648.0;
    }
    case SampleEncoding::kFloat32: {
      float f;
      std::memcpy(&f, p, 4);
      // Full-scale contract: clamp decoded floats to [-1, 1].
      return std::clamp(static_cast<double>(f), -1.0, 1.0);
    }
  }
  return 0.0;
}

int bytes_per_sample(SampleEncoding enc) {
  switch (enc) {
    case SampleEncoding::kPcm16: return 2;
    case SampleEncoding::kPcm24: return 3;
    case SampleEncoding::kPcm32: return 4;
    case SampleEncoding::kFloat32: return 4;
  }
  return 0;
}

}  // namespace

std::pair<Waveform, AudioMetadata> load_wav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path);
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(ErrorCode::kIoError, "read failed: " + path);

  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
    throw Error(ErrorCode::kMalformedFile, path + " is not a RIFF/WAVE file");

  FmtChunk fmt;
  bool have_fmt = false;
  std::size_t data_offset = 0, data_size = 0;
  bool have_data = false;

  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const char* id = reinterpret_cast<const char*>(bytes.data() + pos);
    std::uint32_t chunk_size = read_u32(bytes.data() + pos + 4);
    std::size_t body = pos + 8;
    if (std::memcmp(id, "fmt ", 4) == 0) {
      if (chunk_size < 16 || body + 16 > bytes.size())
        throw Error(ErrorCode::kMalformedFile, "truncated fmt chunk in " + path);
      const unsigned char* f = bytes.data() + body;
      fmt.format = read_u16(f);
      fmt.channels = read_u16(f + 2);
      fmt.sample_rate = read_u32(f + 4);
      fmt.bits_per_sample = read_u16(f + 14);
      if (fmt.format == kFormatExtensible) {
        // Resolve the real format from the SubFormat GUID's leading word.
        if (chunk_size < 40 || body + 40 > bytes.size())
          throw Error(ErrorCode::kMalformedFile,
                      "truncated extensible fmt chunk in " + path);
        fmt.format = read_u16(f + 24);
      }
      have_fmt = true;
    } else if (std::memcmp(id, "data", 4) == 0) {
      data_offset = body;
      data_size = chunk_size;
      have_data = true;
      if (body + chunk_size > bytes.size())
        throw Error(ErrorCode::kMalformedFile,
                    "data chunk extends past end of file in " + path);
      break;  // fmt must precede data; nothing else needed
    }
    pos = body + chunk_size + (chunk_size & 1);  // chunks are word-aligned
  }

  if (!have_fmt || !have_data)
    throw Error(ErrorCode::kMalformedFile, "missing fmt/data chunk in " + path);
  if (fmt.channels == 0 || fmt.sample_rate == 0)
    throw Error(ErrorCode::kMalformedFile, "bad fmt fields in " + path);

  SampleEncoding enc;
  if (fmt.format == kFormatPcm && fmt.bits_per_sample == 16)
    enc = SampleEncoding::kPcm16;
  else if (fmt.format == kFormatPcm && fmt.bits_per_sample == 24)
    enc = SampleEncoding::kPcm24;
  else if (fmt.format == kFormatPcm && fmt.bits_per_sample == 32)
    enc = SampleEncoding::kPcm32;
  else if (fmt.format == kFormatIeeeFloat && fmt.bits_per_sample == 32)
    enc = SampleEncoding::kFloat32;
  else
    throw Error(ErrorCode::kUnsupportedEncoding,
                "format tag " + std::to_string(fmt.format) + ", " +
                    std::to_string(fmt.bits_per_sample) + " bits in " + path);

  const int bps = bytes_per_sample(enc);
  const std::size_t block = static_cast<std::size_t>(bps) * fmt.channels;
  if (data_size % block != 0)
    throw Error(ErrorCode::kMalformedFile,
                "data chunk is not a whole number of frames in " + path);
  const std::size_t num_frames = data_size / block;
  if (num_frames == 0) throw Error(ErrorCode::kEmptyAudio, path);

  Vec samples(static_cast<Index>(num_frames));
  const unsigned char* d = bytes.data() + data_offset;
  const double inv_channels = 1.0 / fmt.channels;
  for (std::size_t i = 0; i < num_frames; ++i) {
    double acc = 0.0;
    for (unsigned c = 0; c < fmt.channels; ++c)
      acc += decode_sample(d + i * block + c * bps, enc);
    samples[static_cast<Index>(i)] = acc * inv_channels;
  }

  Waveform w(std::move(samples), static_cast<int>(fmt.sample_rate));
  AudioMetadata meta;
  meta.channels = fmt.channels;
  meta.encoding = enc;
  meta.duration_s = w.duration_s();
  return {std::move(w), meta};
}

Index save_wav(const Waveform& w, const std::string& path,
               SampleEncoding encoding) {
  if (w.size() == 0) throw Error(ErrorCode::kEmptyAudio, "nothing to write");
  const int bps = bytes_per_sample(encoding);
  const std::uint32_t data_size = static_cast<std::uint32_t>(w.size() * bps);
  const std::uint16_t format =
      encoding == SampleEncoding::kFloat32 ? kFormatIeeeFloat : kFormatPcm;

  std::vector<unsigned char> out;
  out.reserve(44 + data_size);
  out.insert(out.end(), {'R', 'I', 'F', 'F'});
  write_u32(out, 36 + data_size);
  out.insert(out.end(), {'W', 'A', 'V', 'E'});
  out.insert(out.end(), {'f', 'm', 't', ' '});
  write_u32(out, 16);
  write_u16(out, format);
  write_u16(out, 1);  // mono
  write_u32(out, static_cast<std::uint32_t>(w.sample_rate_hz));
  write_u32(out, static_cast<std::uint32_t>(w.sample_rate_hz) * bps);
  write_u16(out, static_cast<std::uint16_t>(bps));
  write_u16(out, static_cast<std::uint16_t>(8 * bps));
  out.insert(out.end(), {'d', 'a', 't', 'a'});
  write_u32(out, data_size);

  Index clipped = 0;
  for (Index i = 0; i < w.size(); ++i) {
    double x = w.samples[i];
    if (x > 1.0 || x < -1.0) {
      ++clipped;
      x = std::clamp(x, -1.0, 1.0);
    }
    switch (encoding) {
      case SampleEncoding::kPcm16: {
        long q = std::lround(x * 32768.0);
        q = std::clamp(q, -32768L, 32767L);
        write_u16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(q)));
        break;
      }
      case SampleEncoding::kPcm24: {
        long q = std::lround(x * 8388608.0);
        q = std::clamp(q, -8388608L, 8388607L);
        std::uint32_t u = static_cast<std::uint32_t>(static_cast<std::int32_t>(q));
        out.push_back(static_cast<unsigned char>(u & 0xFF));
        out.push_back(static_cast<unsigned char>((u >> 8) & 0xFF));
        out.push_back(static_cast<unsigned char>((u >> 16) & 0xFF));
        break;
      }
      case SampleEncoding::kPcm32: {
        double scaled = x * 2147483648.0;
        scaled = std::clamp(scaled, -2147483648.0, 2147483647.0);
        write_u32(out, static_cast<std::uint32_t>(
                           static_cast<std::int32_t>(std::llround(scaled))));
        break;
      }
      case SampleEncoding::kFloat32: {
        float f = static_cast<float>(x);
        std::uint32_t u;
        std::memcpy(&u, &f, 4);
        write_u32(out, u);
        break;
      }
    }
  }

  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw Error(ErrorCode::kIoError, "cannot open for write: " + path);
  os.write(reinterpret_cast<const char*>(out.data()),
           static_cast<std::streamsize>(out.size()));
  if (!os) throw Error(ErrorCode::kIoError, "write failed: " + path);
  return clipped;
}

}  // namespace seval
