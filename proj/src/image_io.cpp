#include "docbin/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>

namespace docbin {

namespace {

std::string lower_ext(const std::filesystem::path& path) {
    std::string e = path.extension().string();
    std::transform(e.begin(), e.end(), e.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return e;
}

std::uint8_t quantize(double v) {
    v = std::clamp(v, 0.0, 1.0);
    return static_cast<std::uint8_t>(std::lround(v * 255.0));
}

[[noreturn]] void fail_unreadable(const std::filesystem::path& path, const std::string& why) {
    throw IoError("unreadable file: " + path.string() + " (" + why + ")");
}

[[noreturn]] void fail_unsupported(const std::filesystem::path& path, const std::string& why) {
    throw IoError("unsupported format: " + path.string() + " (" + why + ")");
}

void check_dims(const std::filesystem::path& path, long w, long h) {
    if (w <= 0 || h <= 0)
        throw IoError("zero-dimension image: " + path.string());
    if (w > 1 << 20 || h > 1 << 20)
        fail_unsupported(path, "implausible dimensions");
}

// ---------------------------------------------------------------- PNG

LoadedImage load_png(const std::filesystem::path& path) {
    png_image image;
    std::memset(&image, 0, sizeof image);
    image.version = PNG_IMAGE_VERSION;

    if (!png_image_begin_read_from_file(&image, path.string().c_str()))
        fail_unreadable(path, image.message);
    if (image.format & PNG_FORMAT_FLAG_LINEAR) {
        png_image_free(&image);
        fail_unsupported(path, "16-bit PNG");
    }
    if (image.width == 0 || image.height == 0) {
        png_image_free(&image);
        throw IoError("zero-dimension image: " + path.string());
    }
    check_dims(path, image.width, image.height);

    const bool color = (image.format & PNG_FORMAT_FLAG_COLOR) != 0;
    image.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;

    std::vector<std::uint8_t> buf(PNG_IMAGE_SIZE(image));
    // Alpha, if present, is composited onto white paper.
    png_color bg{255, 255, 255};
    if (!png_image_finish_read(&image, &bg, buf.data(), 0, nullptr)) {
        std::string msg = image.message;
        png_image_free(&image);
        fail_unreadable(path, msg);
    }

    const int w = static_cast<int>(image.width);
    const int h = static_cast<int>(image.height);
    if (color) {
        RgbImage out(w, h);
        for (size_t i = 0, n = out.size(); i < n; ++i) {
            out.r[i] = buf[3 * i + 0] / 255.0;
            out.g[i] = buf[3 * i + 1] / 255.0;
            out.b[i] = buf[3 * i + 2] / 255.0;
        }
        return out;
    }
    GrayImage out(w, h, Range::Unit);
    for (size_t i = 0, n = out.size(); i < n; ++i)
        out.data[i] = buf[i] / 255.0;
    return out;
}

void save_png_gray(const std::filesystem::path& path, int w, int h,
                   const std::vector<std::uint8_t>& buf) {
    png_image image;
    std::memset(&image, 0, sizeof image);
    image.version = PNG_IMAGE_VERSION;
    image.width = static_cast<png_uint_32>(w);
    image.height = static_cast<png_uint_32>(h);
    image.format = PNG_FORMAT_GRAY;
    if (!png_image_write_to_file(&image, path.string().c_str(), 0, buf.data(), 0, nullptr))
        throw IoError("cannot write file: " + path.string() + " (" + image.message + ")");
}

void save_png_rgb(const std::filesystem::path& path, int w, int h,
                  const std::vector<std::uint8_t>& buf) {
    png_image image;
    std::memset(&image, 0, sizeof image);
    image.version = PNG_IMAGE_VERSION;
    image.width = static_cast<png_uint_32>(w);
    image.height = static_cast<png_uint_32>(h);
    image.format = PNG_FORMAT_RGB;
    if (!png_image_write_to_file(&image, path.string().c_str(), 0, buf.data(), 0, nullptr))
        throw IoError("cannot write file: " + path.string() + " (" + image.message + ")");
}

// ---------------------------------------------------------------- PNM

// Reads the next header token, skipping whitespace and '#' comments.
std::string pnm_token(std::istream& in) {
    std::string tok;
    int c;
    while ((c = in.get()) != EOF) {
        if (c == '#') {
            while ((c = in.get()) != EOF && c != '\n') {}
            continue;
        }
        if (std::isspace(c)) {
            if (!tok.empty()) break;
            continue;
        }
        tok.push_back(static_cast<char>(c));
    }
    return tok;
}

long pnm_int(std::istream& in, const std::filesystem::path& path) {
    const std::string tok = pnm_token(in);
    if (tok.empty() || tok.find_first_not_of("0123456789") != std::string::npos)
        fail_unreadable(path, "malformed PNM header");
    return std::stol(tok);
}

LoadedImage load_pnm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail_unreadable(path, "cannot open");

    const std::string magic = pnm_token(in);
    if (magic != "P2" && magic != "P5" && magic != "P3" && magic != "P6")
        fail_unsupported(path, "PNM magic '" + magic + "'");
    const bool color = (magic == "P3" || magic == "P6");
    const bool ascii = (magic == "P2" || magic == "P3");

    const long w = pnm_int(in, path);
    const long h = pnm_int(in, path);
    const long maxval = pnm_int(in, path);
    check_dims(path, w, h);
    if (maxval < 1 || maxval > 255)
        fail_unsupported(path, "PNM maxval " + std::to_string(maxval) + " (8-bit only)");

    const size_t samples = static_cast<size_t>(w) * h * (color ? 3 : 1);
    std::vector<double> vals(samples);
    if (ascii) {
        for (size_t i = 0; i < samples; ++i) {
            long v = 0;
            if (!(in >> v)) fail_unreadable(path, "truncated PNM data");
            if (v < 0 || v > maxval) fail_unreadable(path, "PNM sample exceeds maxval");
            vals[i] = static_cast<double>(v) / maxval;
        }
    } else {
        std::vector<std::uint8_t> raw(samples);
        in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(samples));
        if (static_cast<size_t>(in.gcount()) != samples)
            fail_unreadable(path, "truncated PNM data");
        for (size_t i = 0; i < samples; ++i) {
            if (raw[i] > maxval) fail_unreadable(path, "PNM sample exceeds maxval");
            vals[i] = static_cast<double>(raw[i]) / maxval;
        }
    }

    const int wi = static_cast<int>(w), hi = static_cast<int>(h);
    if (color) {
        RgbImage out(wi, hi);
        for (size_t i = 0, n = out.size(); i < n; ++i) {
            out.r[i] = vals[3 * i + 0];
            out.g[i] = vals[3 * i + 1];
            out.b[i] = vals[3 * i + 2];
        }
        return out;
    }
    GrayImage out(wi, hi, Range::Unit);
    out.data = std::move(vals);
    return out;
}

void save_pgm(const std::filesystem::path& path, int w, int h,
              const std::vector<std::uint8_t>& buf) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write file: " + path.string());
    out << "P5\n" << w << " " << h << "\n255\n";
    out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (!out) throw IoError("cannot write file: " + path.string());
}

void save_ppm(const std::filesystem::path& path, int w, int h,
              const std::vector<std::uint8_t>& buf) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write file: " + path.string());
    out << "P6\n" << w << " " << h << "\n255\n";
    out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (!out) throw IoError("cannot write file: " + path.string());
}

// ---------------------------------------------------------------- BMP

std::uint32_t rd_u32(const std::uint8_t* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}
std::int32_t rd_i32(const std::uint8_t* p) { return static_cast<std::int32_t>(rd_u32(p)); }
std::uint16_t rd_u16(const std::uint8_t* p) {
    return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

void wr_u32(std::vector<std::uint8_t>& v, std::uint32_t x) {
    v.push_back(static_cast<std::uint8_t>(x & 0xff));
    v.push_back(static_cast<std::uint8_t>((x >> 8) & 0xff));
    v.push_back(static_cast<std::uint8_t>((x >> 16) & 0xff));
    v.push_back(static_cast<std::uint8_t>((x >> 24) & 0xff));
}
void wr_u16(std::vector<std::uint8_t>& v, std::uint16_t x) {
    v.push_back(static_cast<std::uint8_t>(x & 0xff));
    v.push_back(static_cast<std::uint8_t>((x >> 8) & 0xff));
}

LoadedImage load_bmp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail_unreadable(path, "cannot open");
    std::vector<std::uint8_t> file((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
    if (file.size() < 54 || file[0] != 'B' || file[1] != 'M')
        fail_unreadable(path, "not a BMP file");

    const std::uint32_t data_offset = rd_u32(&file[10]);
    const std::uint32_t hdr_size = rd_u32(&file[14]);
    if (hdr_size < 40) fail_unsupported(path, "BMP header variant");
    const std::int32_t w = rd_i32(&file[18]);
    const std::int32_t h_raw = rd_i32(&file[22]);
    const bool top_down = h_raw < 0;
    const std::int32_t h = top_down ? -h_raw : h_raw;
    const std::uint16_t bpp = rd_u16(&file[28]);
    const std::uint32_t compression = rd_u32(&file[30]);
    check_dims(path, w, h);
    if (compression != 0) fail_unsupported(path, "compressed BMP");
    if (bpp != 8 && bpp != 24) fail_unsupported(path, "BMP bit depth " + std::to_string(bpp));

    const size_t row_bytes = (static_cast<size_t>(w) * bpp / 8 + 3) & ~size_t{3};
    if (file.size() < data_offset + row_bytes * static_cast<size_t>(h))
        fail_unreadable(path, "truncated BMP data");

    auto row_ptr = [&](int y) {
        const int src_y = top_down ? y : h - 1 - y;
        return &file[data_offset + row_bytes * static_cast<size_t>(src_y)];
    };

    if (bpp == 8) {
        std::uint32_t palette_count = rd_u32(&file[46]);
        if (palette_count == 0) palette_count = 256;
        if (palette_count > 256) fail_unreadable(path, "oversized BMP palette");
        const size_t pal_off = 14 + hdr_size;
        if (file.size() < pal_off + 4 * palette_count)
            fail_unreadable(path, "truncated BMP palette");
        std::vector<std::array<std::uint8_t, 3>> pal(256, {0, 0, 0});
        bool gray_palette = true;
        for (std::uint32_t i = 0; i < palette_count; ++i) {
            const std::uint8_t* p = &file[pal_off + 4 * i];
            pal[i] = {p[2], p[1], p[0]}; // stored as B,G,R,reserved
            if (!(p[0] == p[1] && p[1] == p[2])) gray_palette = false;
        }
        if (gray_palette) {
            GrayImage out(w, h, Range::Unit);
            for (int y = 0; y < h; ++y) {
                const std::uint8_t* row = row_ptr(y);
                for (int x = 0; x < w; ++x) out.at(x, y) = pal[row[x]][0] / 255.0;
            }
            return out;
        }
        RgbImage out(w, h);
        for (int y = 0; y < h; ++y) {
            const std::uint8_t* row = row_ptr(y);
            for (int x = 0; x < w; ++x) {
                const auto& c = pal[row[x]];
                const size_t i = out.idx(x, y);
                out.r[i] = c[0] / 255.0;
                out.g[i] = c[1] / 255.0;
                out.b[i] = c[2] / 255.0;
            }
        }
        return out;
    }

    RgbImage out(w, h);
    for (int y = 0; y < h; ++y) {
        const std::uint8_t* row = row_ptr(y);
        for (int x = 0; x < w; ++x) {
            const size_t i = out.idx(x, y);
            out.b[i] = row[3 * x + 0] / 255.0;
            out.g[i] = row[3 * x + 1] / 255.0;
            out.r[i] = row[3 * x + 2] / 255.0;
        }
    }
    return out;
}

void write_file(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write file: " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("cannot write file: " + path.string());
}

// 8-bit BMP with an identity grayscale palette.
void save_bmp_gray(const std::filesystem::path& path, int w, int h,
                   const std::vector<std::uint8_t>& buf) {
    const size_t row_bytes = (static_cast<size_t>(w) + 3) & ~size_t{3};
    const std::uint32_t data_offset = 14 + 40 + 256 * 4;
    const std::uint32_t file_size =
        data_offset + static_cast<std::uint32_t>(row_bytes * static_cast<size_t>(h));

    std::vector<std::uint8_t> out;
    out.reserve(file_size);
    out.push_back('B');
    out.push_back('M');
    wr_u32(out, file_size);
    wr_u32(out, 0);
    wr_u32(out, data_offset);
    wr_u32(out, 40);
    wr_u32(out, static_cast<std::uint32_t>(w));
    wr_u32(out, static_cast<std::uint32_t>(h));
    wr_u16(out, 1);
    wr_u16(out, 8);
    wr_u32(out, 0);
    wr_u32(out, static_cast<std::uint32_t>(row_bytes * static_cast<size_t>(h)));
    wr_u32(out, 2835);
    wr_u32(out, 2835);
    wr_u32(out, 256);
    wr_u32(out, 0);
    for (int i = 0; i < 256; ++i) {
        out.push_back(static_cast<std::uint8_t>(i));
        out.push_back(static_cast<std::uint8_t>(i));
        out.push_back(static_cast<std::uint8_t>(i));
        out.push_back(0);
    }
    for (int y = h - 1; y >= 0; --y) {
        for (int x = 0; x < w; ++x) out.push_back(buf[static_cast<size_t>(y) * w + x]);
        out.resize(out.size() + (row_bytes - static_cast<size_t>(w)), 0);
    }
    write_file(path, out);
}

void save_bmp_rgb(const std::filesystem::path& path, int w, int h,
                  const std::vector<std::uint8_t>& rgb) {
    const size_t row_bytes = (static_cast<size_t>(w) * 3 + 3) & ~size_t{3};
    const std::uint32_t data_offset = 14 + 40;
    const std::uint32_t file_size =
        data_offset + static_cast<std::uint32_t>(row_bytes * static_cast<size_t>(h));

    std::vector<std::uint8_t> out;
    out.reserve(file_size);
    out.push_back('B');
    out.push_back('M');
    wr_u32(out, file_size);
    wr_u32(out, 0);
    wr_u32(out, data_offset);
    wr_u32(out, 40);
    wr_u32(out, static_cast<std::uint32_t>(w));
    wr_u32(out, static_cast<std::uint32_t>(h));
    wr_u16(out, 1);
    wr_u16(out, 24);
    wr_u32(out, 0);
    wr_u32(out, static_cast<std::uint32_t>(row_bytes * static_cast<size_t>(h)));
    wr_u32(out, 2835);
    wr_u32(out, 2835);
    wr_u32(out, 0);
    wr_u32(out, 0);
    for (int y = h - 1; y >= 0; --y) {
        for (int x = 0; x < w; ++x) {
            const size_t i = (static_cast<size_t>(y) * w + x) * 3;
            out.push_back(rgb[i + 2]);
            out.push_back(rgb[i + 1]);
            out.push_back(rgb[i + 0]);
        }
        out.resize(out.size() + (row_bytes - static_cast<size_t>(w) * 3), 0);
    }
    write_file(path, out);
}

} // namespace

bool is_supported_image_ext(const std::filesystem::path& path) {
    const std::string e = lower_ext(path);
    return e == ".png" || e == ".bmp" || e == ".pgm" || e == ".ppm";
}

LoadedImage load_image(const std::filesystem::path& path) {
    std::error_code ec;
    if (!std::filesystem::exists(path, ec))
        throw IoError("unreadable file: " + path.string() + " (no such file)");
    const std::string e = lower_ext(path);
    if (e == ".png") return load_png(path);
    if (e == ".pgm" || e == ".ppm") return load_pnm(path);
    if (e == ".bmp") return load_bmp(path);
    throw IoError("unsupported format: " + path.string());
}

GrayImage load_gray(const std::filesystem::path& path) {
    LoadedImage img = load_image(path);
    if (std::holds_alternative<GrayImage>(img)) return std::get<GrayImage>(std::move(img));
    const RgbImage& rgb = std::get<RgbImage>(img);
    GrayImage out(rgb.width, rgb.height, Range::Unit);
    for (size_t i = 0, n = rgb.size(); i < n; ++i)
        out.data[i] = 0.299 * rgb.r[i] + 0.587 * rgb.g[i] + 0.114 * rgb.b[i];
    return out;
}

void save_image(const std::filesystem::path& path, const GrayImage& img) {
    std::vector<std::uint8_t> buf(img.size());
    // Signed fields are written in unit scale.
    const bool is_signed = img.range == Range::Signed;
    for (size_t i = 0; i < buf.size(); ++i)
        buf[i] = quantize(is_signed ? (img.data[i] + 1.0) / 2.0 : img.data[i]);
    const std::string e = lower_ext(path);
    if (e == ".png") return save_png_gray(path, img.width, img.height, buf);
    if (e == ".pgm") return save_pgm(path, img.width, img.height, buf);
    if (e == ".bmp") return save_bmp_gray(path, img.width, img.height, buf);
    throw IoError("unsupported format for grayscale output: " + path.string());
}

void save_image(const std::filesystem::path& path, const RgbImage& img) {
    std::vector<std::uint8_t> buf(img.size() * 3);
    for (size_t i = 0, n = img.size(); i < n; ++i) {
        buf[3 * i + 0] = quantize(img.r[i]);
        buf[3 * i + 1] = quantize(img.g[i]);
        buf[3 * i + 2] = quantize(img.b[i]);
    }
    const std::string e = lower_ext(path);
    if (e == ".png") return save_png_rgb(path, img.width, img.height, buf);
    if (e == ".ppm") return save_ppm(path, img.width, img.height, buf);
    if (e == ".bmp") return save_bmp_rgb(path, img.width, img.height, buf);
    throw IoError("unsupported format for color output: " + path.string());
}

void save_image(const std::filesystem::path& path, const BinaryImage& img) {
    GrayImage gray(img.width, img.height, Range::Unit);
    for (size_t i = 0, n = img.size(); i < n; ++i)
        gray.data[i] = img.fg[i] ? 0.0 : 1.0;
    save_image(path, gray);
}

} // namespace docbin
