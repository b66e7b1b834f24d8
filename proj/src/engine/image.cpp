#include "engine/image.hpp"

#include <jpeglib.h>
#include <png.h>

#include <algorithm>
#include <csetjmp>
#include <cstdio>
#include <string>

#include "common/digest.hpp"
#include "common/error.hpp"
#include "common/files.hpp"

namespace photoart {

Image::Image(int width, int height)
    : width_(width), height_(height), rgb_(3 * static_cast<std::size_t>(width) * height, 0) {
  if (width < 1 || height < 1) fail(ErrorCode::kInvalidArgument, "image dimensions must be >= 1");
}

Image::Image(int width, int height, std::vector<std::uint8_t> rgb)
    : width_(width), height_(height), rgb_(std::move(rgb)) {
  if (width < 1 || height < 1) fail(ErrorCode::kInvalidArgument, "image dimensions must be >= 1");
  if (rgb_.size() != 3 * static_cast<std::size_t>(width) * height) {
    fail(ErrorCode::kInvalidArgument, "pixel buffer size does not match dimensions");
  }
}

namespace {

bool is_png(std::span<const std::uint8_t> b) {
  return b.size() >= 8 && png_sig_cmp(b.data(), 0, 8) == 0;
}

bool is_jpeg(std::span<const std::uint8_t> b) {
  return b.size() >= 3 && b[0] == 0xFF && b[1] == 0xD8 && b[2] == 0xFF;
}

Image decode_png(std::span<const std::uint8_t> bytes) {
  png_image img{};
  img.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&img, bytes.data(), bytes.size())) {
    fail(ErrorCode::kIo, std::string("PNG decode failed: ") + img.message);
  }
  img.format = PNG_FORMAT_RGB;
  if (img.width == 0 || img.height == 0) {
    png_image_free(&img);
    fail(ErrorCode::kIo, "PNG has zero size");
  }
  std::vector<std::uint8_t> rgb(PNG_IMAGE_SIZE(img));
  if (!png_image_finish_read(&img, nullptr, rgb.data(), 0, nullptr)) {
    std::string msg = img.message;
    png_image_free(&img);
    fail(ErrorCode::kIo, "PNG decode failed: " + msg);
  }
  return Image(static_cast<int>(img.width), static_cast<int>(img.height), std::move(rgb));
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

// Warnings (e.g. premature end of data) mean a truncated or corrupt file.
void jpeg_emit_message(j_common_ptr cinfo, int level) {
  if (level < 0) jpeg_error_exit(cinfo);
}

// Kept free of C++ objects with destructors because of longjmp.
bool decode_jpeg_raw(std::span<const std::uint8_t> bytes, std::vector<std::uint8_t>& out,
                     int& width, int& height, char* message) {
  jpeg_decompress_struct cinfo{};
  JpegErrorManager jerr{};
  cinfo.err = jpeg_std_error(&jerr.base);
  jerr.base.error_exit = jpeg_error_exit;
  jerr.base.emit_message = jpeg_emit_message;
  if (setjmp(jerr.jump)) {
    std::copy(std::begin(jerr.message), std::end(jerr.message), message);
    jpeg_destroy_decompress(&cinfo);
    return false;
  }
  jpeg_create_decompress(&cinfo);
  jpeg_mem_src(&cinfo, bytes.data(), static_cast<unsigned long>(bytes.size()));
  jpeg_read_header(&cinfo, TRUE);
  cinfo.out_color_space = JCS_RGB;
  jpeg_start_decompress(&cinfo);
  width = static_cast<int>(cinfo.output_width);
  height = static_cast<int>(cinfo.output_height);
  out.resize(3 * static_cast<std::size_t>(width) * height);
  while (cinfo.output_scanline < cinfo.output_height) {
    JSAMPROW row = &out[3 * static_cast<std::size_t>(cinfo.output_scanline) * width];
    jpeg_read_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_decompress(&cinfo);
  jpeg_destroy_decompress(&cinfo);
  return true;
}

bool encode_jpeg_raw(const Image& image, int quality, unsigned char** buffer,
                     unsigned long* size, char* message) {
  jpeg_compress_struct cinfo{};
  JpegErrorManager jerr{};
  cinfo.err = jpeg_std_error(&jerr.base);
  jerr.base.error_exit = jpeg_error_exit;
  if (setjmp(jerr.jump)) {
    std::copy(std::begin(jerr.message), std::end(jerr.message), message);
    jpeg_destroy_compress(&cinfo);
    return false;
  }
  jpeg_create_compress(&cinfo);
  jpeg_mem_dest(&cinfo, buffer, size);
  cinfo.image_width = static_cast<JDIMENSION>(image.width());
  cinfo.image_height = static_cast<JDIMENSION>(image.height());
  cinfo.input_components = 3;
  cinfo.in_color_space = JCS_RGB;
  jpeg_set_defaults(&cinfo);
  jpeg_set_quality(&cinfo, quality, TRUE);
  jpeg_start_compress(&cinfo, TRUE);
  const auto* data = image.data().data();
  while (cinfo.next_scanline < cinfo.image_height) {
    auto* row = const_cast<JSAMPROW>(&data[3 * static_cast<std::size_t>(cinfo.next_scanline) *
                                           image.width()]);
    jpeg_write_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_compress(&cinfo);
  jpeg_destroy_compress(&cinfo);
  return true;
}

}  // namespace

Image decode_image(std::span<const std::uint8_t> bytes) {
  if (bytes.empty()) fail(ErrorCode::kIo, "empty image data");
  if (is_png(bytes)) return decode_png(bytes);
  if (is_jpeg(bytes)) {
    std::vector<std::uint8_t> rgb;
    int w = 0, h = 0;
    char message[JMSG_LENGTH_MAX] = {};
    if (!decode_jpeg_raw(bytes, rgb, w, h, message)) {
      fail(ErrorCode::kIo, std::string("JPEG decode failed: ") + message);
    }
    if (w < 1 || h < 1) fail(ErrorCode::kIo, "JPEG has zero size");
    return Image(w, h, std::move(rgb));
  }
  fail(ErrorCode::kIo, "unrecognized image format (expected PNG or JPEG)");
}

Image load_image(const std::filesystem::path& path) { return decode_image(read_file_bytes(path)); }

std::vector<std::uint8_t> encode_png(const Image& image) {
  if (image.empty()) fail(ErrorCode::kInvalidArgument, "cannot encode an empty image");
  png_image img{};
  img.version = PNG_IMAGE_VERSION;
  img.width = static_cast<png_uint_32>(image.width());
  img.height = static_cast<png_uint_32>(image.height());
  img.format = PNG_FORMAT_RGB;
  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&img, nullptr, &size, 0, image.data().data(), 0, nullptr)) {
    fail(ErrorCode::kIo, std::string("PNG encode failed: ") + img.message);
  }
  std::vector<std::uint8_t> out(size);
  if (!png_image_write_to_memory(&img, out.data(), &size, 0, image.data().data(), 0, nullptr)) {
    fail(ErrorCode::kIo, std::string("PNG encode failed: ") + img.message);
  }
  out.resize(size);
  return out;
}

std::vector<std::uint8_t> encode_jpeg(const Image& image, int quality) {
  if (image.empty()) fail(ErrorCode::kInvalidArgument, "cannot encode an empty image");
  unsigned char* buffer = nullptr;
  unsigned long size = 0;
  char message[JMSG_LENGTH_MAX] = {};
  const bool ok = encode_jpeg_raw(image, quality, &buffer, &size, message);
  std::vector<std::uint8_t> out;
  if (ok) out.assign(buffer, buffer + size);
  std::free(buffer);
  if (!ok) fail(ErrorCode::kIo, std::string("JPEG encode failed: ") + message);
  return out;
}

void save_image(const Image& image, const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  if (ext == ".png") {
    write_file(path, encode_png(image));
  } else if (ext == ".jpg" || ext == ".jpeg") {
    write_file(path, encode_jpeg(image, 95));
  } else {
    fail(ErrorCode::kIo, "unsupported output extension '" + ext + "' (use .png or .jpg)");
  }
}

}  // namespace photoart

namespace photoart {

std::string image_digest(const Image& image) {
  const std::string header =
      "rgb8:" + std::to_string(image.width()) + "x" + std::to_string(image.height()) + "\n";
  Sha256 h;
  h.update(header);
  h.update(image.data());
  return h.hex();
}

}  // namespace photoart
