/*
 * Copyright 2026 The zdce Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "zdce/image_io.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <fstream>
#include <memory>

#include <jpeglib.h>
#include <png.h>

namespace zdce {

namespace fs = std::filesystem;

namespace {

std::vector<std::uint8_t> read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw IoError("cannot open " + path.string());
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), {});
}

Image8 decode_png(const std::vector<std::uint8_t>& bytes,
                  const fs::path& path) {
  png_image img{};
  img.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&img, bytes.data(), bytes.size()))
    throw IoError("cannot decode PNG " + path.string() + ": " + img.message);
  img.format = PNG_FORMAT_RGB;
  Image8 out;
  out.width = static_cast<int>(img.width);
  out.height = static_cast<int>(img.height);
  out.rgb.resize(PNG_IMAGE_SIZE(img));
  // Alpha is dropped without compositing.
  if (!png_image_finish_read(&img, nullptr, out.rgb.data(), 0, nullptr)) {
    std::string msg = img.message;
    png_image_free(&img);
    throw IoError("cannot decode PNG " + path.string() + ": " + msg);
  }
  return out;
}

struct JpegErrorManager {
  jpeg_error_mgr base;
  std::jmp_buf jump;
  char message[JMSG_LENGTH_MAX];
};

void jpeg_error_exit(j_common_ptr cinfo) {
  auto* err = reinterpret_cast<JpegErrorManager*>(cinfo->err);
  (*cinfo->err->format_message)(cinfo, err->message);
  std::longjmp(err->jump, 1);
}

Image8 decode_jpeg(const std::vector<std::uint8_t>& bytes,
                   const fs::path& path) {
  jpeg_decompress_struct cinfo{};
  JpegErrorManager err{};
  cinfo.err = jpeg_std_error(&err.base);
  err.base.error_exit = jpeg_error_exit;
  Image8 out;
  if (setjmp(err.jump)) {
    jpeg_destroy_decompress(&cinfo);
    throw IoError("cannot decode JPEG " + path.string() + ": " + err.message);
  }
  jpeg_create_decompress(&cinfo);
  jpeg_mem_src(&cinfo, bytes.data(), static_cast<unsigned long>(bytes.size()));
  jpeg_read_header(&cinfo, TRUE);
  cinfo.out_color_space = JCS_RGB;
  jpeg_start_decompress(&cinfo);
  out.width = static_cast<int>(cinfo.output_width);
  out.height = static_cast<int>(cinfo.output_height);
  out.rgb.resize(static_cast<std::size_t>(out.width) * out.height * 3);
  while (cinfo.output_scanline < cinfo.output_height) {
    JSAMPROW row = out.rgb.data() + static_cast<std::size_t>(
                                        cinfo.output_scanline) *
                                        out.width * 3;
    jpeg_read_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_decompress(&cinfo);
  jpeg_destroy_decompress(&cinfo);
  return out;
}

} // namespace

Image8 read_image(const fs::path& path) {
  const std::vector<std::uint8_t> bytes = read_file(path);
  static constexpr std::array<std::uint8_t, 8> png_sig{0x89, 'P', 'N', 'G',
                                                       '\r', '\n', 0x1a, '\n'};
  if (bytes.size() >= 8 && std::equal(png_sig.begin(), png_sig.end(),
                                      bytes.begin()))
    return decode_png(bytes, path);
  if (bytes.size() >= 3 && bytes[0] == 0xFF && bytes[1] == 0xD8 &&
      bytes[2] == 0xFF)
    return decode_jpeg(bytes, path);
  throw IoError("unrecognised image format: " + path.string());
}

void write_png(const fs::path& path, const Image8& image) {
  if (image.rgb.size() != static_cast<std::size_t>(image.width) *
                              image.height * 3)
    throw ShapeError("write_png: pixel buffer does not match dimensions");
  png_image img{};
  img.version = PNG_IMAGE_VERSION;
  img.width = static_cast<png_uint_32>(image.width);
  img.height = static_cast<png_uint_32>(image.height);
  img.format = PNG_FORMAT_RGB;
  if (!png_image_write_to_file(&img, path.string().c_str(), 0,
                               image.rgb.data(), 0, nullptr))
    throw IoError("cannot write PNG " + path.string() + ": " + img.message);
}

Tensor to_tensor(const Image8& image) {
  const int h = image.height, w = image.width;
  Tensor t(Shape{1, 3, h, w});
  for (int c = 0; c < 3; ++c) {
    Real* dst = t.plane(0, c);
    for (std::size_t i = 0; i < static_cast<std::size_t>(h) * w; ++i)
      dst[i] = static_cast<Real>(image.rgb[i * 3 + c]) / Real(255);
  }
  return t;
}

namespace {

std::uint8_t quantize(Real v) {
  const double clamped = std::clamp(static_cast<double>(v), 0.0, 1.0);
  return static_cast<std::uint8_t>(std::lround(clamped * 255.0));
}

} // namespace

Image8 to_image8(const Tensor& t, int n) {
  if (t.channels() != 3)
    throw ShapeError("to_image8 expects 3 channels, got " + t.shape().str());
  Image8 out;
  out.width = t.width();
  out.height = t.height();
  const std::size_t plane = t.shape().plane();
  out.rgb.resize(plane * 3);
  for (int c = 0; c < 3; ++c) {
    const Real* src = t.plane(n, c);
    for (std::size_t i = 0; i < plane; ++i)
      out.rgb[i * 3 + c] = quantize(src[i]);
  }
  return out;
}

Image8 gray_to_image8(const Tensor& t, int n) {
  if (t.channels() != 1)
    throw ShapeError("gray_to_image8 expects 1 channel");
  Image8 out;
  out.width = t.width();
  out.height = t.height();
  const std::size_t plane = t.shape().plane();
  out.rgb.resize(plane * 3);
  const Real* src = t.plane(n, 0);
  for (std::size_t i = 0; i < plane; ++i)
    out.rgb[i * 3] = out.rgb[i * 3 + 1] = out.rgb[i * 3 + 2] = quantize(src[i]);
  return out;
}

Tensor resize_bilinear(const Tensor& t, int height, int width) {
  if (height < 1 || width < 1)
    throw ShapeError("resize_bilinear: target size must be positive");
  const Shape& s = t.shape();
  if (s.h < 1 || s.w < 1)
    throw ShapeError("resize_bilinear: empty source");
  Tensor out(Shape{s.n, s.c, height, width});
  const double sy = static_cast<double>(s.h) / height;
  const double sx = static_cast<double>(s.w) / width;

  struct Tap {
    int i0, i1;
    double f;
  };
  auto taps = [](int count, double scale, int limit) {
    std::vector<Tap> v(count);
    for (int i = 0; i < count; ++i) {
      double src = (i + 0.5) * scale - 0.5;
      src = std::clamp(src, 0.0, static_cast<double>(limit - 1));
      const int i0 = static_cast<int>(std::floor(src));
      const int i1 = std::min(i0 + 1, limit - 1);
      v[i] = {i0, i1, src - i0};
    }
    return v;
  };
  const std::vector<Tap> ty = taps(height, sy, s.h);
  const std::vector<Tap> tx = taps(width, sx, s.w);

  for (int n = 0; n < s.n; ++n)
    for (int c = 0; c < s.c; ++c) {
      const Real* src = t.plane(n, c);
      Real* dst = out.plane(n, c);
      for (int y = 0; y < height; ++y) {
        const Real* r0 = src + static_cast<std::size_t>(ty[y].i0) * s.w;
        const Real* r1 = src + static_cast<std::size_t>(ty[y].i1) * s.w;
        const double fy = ty[y].f;
        for (int x = 0; x < width; ++x) {
          const double fx = tx[x].f;
          const double top = r0[tx[x].i0] * (1 - fx) + r0[tx[x].i1] * fx;
          const double bot = r1[tx[x].i0] * (1 - fx) + r1[tx[x].i1] * fx;
          dst[static_cast<std::size_t>(y) * width + x] =
              static_cast<Real>(top * (1 - fy) + bot * fy);
        }
      }
    }
  return out;
}

} // namespace zdce
