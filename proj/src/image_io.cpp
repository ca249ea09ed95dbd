#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <memory>
#include <stdexcept>
#include <vector>

#include <jpeglib.h>
#include <png.h>

#include "cpcf/image_io.hpp"

namespace cpcf {
namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

[[noreturn]] void fail(const std::string& path, const char* what) {
    throw std::runtime_error(std::string(what) + ": " + path);
}

Image load_png(const std::string& path, std::FILE* fp) {
    png_structp png =
        png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr,
                               nullptr);
    if (!png) fail(path, "png reader allocation failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        fail(path, "png info allocation failed");
    }
    std::vector<png_bytep> rows;
    std::vector<png_byte> data;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        fail(path, "png decode failed");
    }
    png_init_io(png, fp);
    png_read_info(png, info);

    const png_uint_32 width = png_get_image_width(png, info);
    const png_uint_32 height = png_get_image_height(png, info);
    const png_byte color = png_get_color_type(png, info);
    const png_byte depth = png_get_bit_depth(png, info);

    // Normalize every variant to 8-bit gray or RGB.
    if (depth == 16) png_set_strip_16(png);
    if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color == PNG_COLOR_TYPE_GRAY && depth < 8)
        png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
    png_read_update_info(png, info);

    const std::size_t channels = png_get_channels(png, info);
    const std::size_t stride = png_get_rowbytes(png, info);
    data.resize(stride * height);
    rows.resize(height);
    for (png_uint_32 i = 0; i < height; ++i) rows[i] = data.data() + i * stride;
    png_read_image(png, rows.data());
    png_destroy_read_struct(&png, &info, nullptr);

    const std::size_t out_channels = channels >= 3 ? 3 : 1;
    Image img(height, width, out_channels);
    for (std::size_t i = 0; i < height; ++i)
        for (std::size_t j = 0; j < width; ++j)
            for (std::size_t c = 0; c < out_channels; ++c)
                img.at(i, j, c) =
                    static_cast<float>(data[i * stride + j * channels + c]) /
                    255.0f;
    return img;
}

struct JpegErrorMgr {
    jpeg_error_mgr base;
    std::jmp_buf jump;
};

void jpeg_error_exit(j_common_ptr cinfo) {
    std::longjmp(reinterpret_cast<JpegErrorMgr*>(cinfo->err)->jump, 1);
}

Image load_jpeg(const std::string& path, std::FILE* fp) {
    jpeg_decompress_struct cinfo;
    JpegErrorMgr err;
    cinfo.err = jpeg_std_error(&err.base);
    err.base.error_exit = jpeg_error_exit;
    if (setjmp(err.jump)) {
        jpeg_destroy_decompress(&cinfo);
        fail(path, "jpeg decode failed");
    }
    jpeg_create_decompress(&cinfo);
    jpeg_stdio_src(&cinfo, fp);
    jpeg_read_header(&cinfo, TRUE);
    cinfo.out_color_space = cinfo.num_components >= 3 ? JCS_RGB : JCS_GRAYSCALE;
    jpeg_start_decompress(&cinfo);

    const std::size_t width = cinfo.output_width;
    const std::size_t height = cinfo.output_height;
    const std::size_t channels = cinfo.output_components;
    Image img(height, width, channels >= 3 ? 3 : 1);
    std::vector<JSAMPLE> row(width * channels);
    JSAMPROW rowp = row.data();
    for (std::size_t i = 0; i < height; ++i) {
        jpeg_read_scanlines(&cinfo, &rowp, 1);
        for (std::size_t j = 0; j < width; ++j)
            for (std::size_t c = 0; c < img.channels; ++c)
                img.at(i, j, c) =
                    static_cast<float>(row[j * channels + c]) / 255.0f;
    }
    jpeg_finish_decompress(&cinfo);
    jpeg_destroy_decompress(&cinfo);
    return img;
}

}  // namespace

Image load_image(const std::string& path) {
    FilePtr fp(std::fopen(path.c_str(), "rb"));
    if (!fp) fail(path, "cannot open image");
    unsigned char magic[4] = {0, 0, 0, 0};
    const std::size_t got = std::fread(magic, 1, sizeof magic, fp.get());
    std::rewind(fp.get());
    if (got >= 4 && png_sig_cmp(magic, 0, 4) == 0)
        return load_png(path, fp.get());
    if (got >= 2 && magic[0] == 0xFF && magic[1] == 0xD8)
        return load_jpeg(path, fp.get());
    fail(path, "unsupported image format");
}

void save_png(const std::string& path, const Image& img) {
    if (img.empty()) throw std::invalid_argument("save_png: empty image");
    if (img.channels != 1 && img.channels != 3)
        throw std::invalid_argument("save_png: need 1 or 3 channels");
    FilePtr fp(std::fopen(path.c_str(), "wb"));
    if (!fp) fail(path, "cannot open for writing");

    png_structp png =
        png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr,
                                nullptr);
    if (!png) fail(path, "png writer allocation failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        fail(path, "png info allocation failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        fail(path, "png encode failed");
    }
    png_init_io(png, fp.get());
    png_set_IHDR(png, info, static_cast<png_uint_32>(img.width),
                 static_cast<png_uint_32>(img.height), 8,
                 img.channels == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);

    std::vector<png_byte> row(img.width * img.channels);
    for (std::size_t i = 0; i < img.height; ++i) {
        for (std::size_t j = 0; j < img.width; ++j)
            for (std::size_t c = 0; c < img.channels; ++c) {
                float v = img.at(i, j, c);
                v = v < 0.0f ? 0.0f : (v > 1.0f ? 1.0f : v);
                row[j * img.channels + c] =
                    static_cast<png_byte>(v * 255.0f + 0.5f);
            }
        png_write_row(png, row.data());
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

}  // namespace cpcf
