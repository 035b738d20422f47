#include "smokeflow/imgio.hpp"

#include <png.h>

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

namespace smokeflow::imgio {

namespace {

namespace fs = std::filesystem;

float from_u8(unsigned v) { return static_cast<float>(v) / 255.0f; }
float from_u16(unsigned v) { return static_cast<float>(v) / 65535.0f; }

uint8_t to_u8(float v) {
    float c = std::clamp(v, 0.0f, 1.0f);
    return static_cast<uint8_t>(std::lround(c * 255.0f));
}

// Atomic write: stream into <path>.tmp~ in the same directory, then rename.
class AtomicFile {
public:
    explicit AtomicFile(const std::string& path)
        : target_(path), tmp_(path + ".tmp~") {
        stream_.open(tmp_, std::ios::binary | std::ios::trunc);
        if (!stream_)
            throw IoFailure("cannot open for writing: " + tmp_);
    }
    ~AtomicFile() {
        if (!committed_) {
            stream_.close();
            std::error_code ec;
            fs::remove(tmp_, ec);
        }
    }
    std::ostream& stream() { return stream_; }
    const std::string& tmp_path() const { return tmp_; }

    void commit() {
        stream_.flush();
        if (!stream_)
            throw IoFailure("write failed: " + tmp_);
        stream_.close();
        std::error_code ec;
        fs::rename(tmp_, target_, ec);
        if (ec)
            throw IoFailure("rename failed: " + tmp_ + " -> " + target_);
        committed_ = true;
    }

private:
    std::string target_;
    std::string tmp_;
    std::ofstream stream_;
    bool committed_ = false;
};

void put_le32(std::ostream& os, uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                          static_cast<unsigned char>((v >> 8) & 0xff),
                          static_cast<unsigned char>((v >> 16) & 0xff),
                          static_cast<unsigned char>((v >> 24) & 0xff)};
    os.write(reinterpret_cast<const char*>(b), 4);
}

void put_le_float(std::ostream& os, float f) {
    uint32_t v;
    std::memcpy(&v, &f, 4);
    put_le32(os, v);
}

bool get_le32(std::istream& is, uint32_t& v) {
    unsigned char b[4];
    if (!is.read(reinterpret_cast<char*>(b), 4)) return false;
    v = static_cast<uint32_t>(b[0]) | (static_cast<uint32_t>(b[1]) << 8) |
        (static_cast<uint32_t>(b[2]) << 16) | (static_cast<uint32_t>(b[3]) << 24);
    return true;
}

bool get_le_float(std::istream& is, float& f) {
    uint32_t v;
    if (!get_le32(is, v)) return false;
    std::memcpy(&f, &v, 4);
    return true;
}

// ---------------------------------------------------------------- PNG

struct PngReadCtx {
    std::ifstream* in;
};

void png_read_cb(png_structp png, png_bytep out, png_size_t len) {
    auto* ctx = static_cast<PngReadCtx*>(png_get_io_ptr(png));
    if (!ctx->in->read(reinterpret_cast<char*>(out), static_cast<std::streamsize>(len)))
        png_error(png, "truncated stream");
}

void png_write_cb(png_structp png, png_bytep data, png_size_t len) {
    auto* os = static_cast<std::ostream*>(png_get_io_ptr(png));
    os->write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(len));
}

void png_flush_cb(png_structp) {}

ImageFrame read_png(std::ifstream& in, const std::string& path) {
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoFailure("libpng initialization failed: " + path);
    }

    std::vector<png_bytep> rows;
    std::vector<uint8_t> buf;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw CorruptHeader("invalid PNG stream: " + path);
    }

    PngReadCtx ctx{&in};
    png_set_read_fn(png, &ctx, png_read_cb);
    png_read_info(png, info);

    png_uint_32 w = png_get_image_width(png, info);
    png_uint_32 h = png_get_image_height(png, info);
    int depth = png_get_bit_depth(png, info);
    int color = png_get_color_type(png, info);

    if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    png_set_strip_alpha(png);
    png_read_update_info(png, info);

    depth = png_get_bit_depth(png, info);
    color = png_get_color_type(png, info);
    int chans = (color == PNG_COLOR_TYPE_GRAY) ? 1 : 3;

    size_t stride = png_get_rowbytes(png, info);
    buf.assign(stride * h, 0);
    rows.resize(h);
    for (png_uint_32 y = 0; y < h; ++y) rows[y] = buf.data() + y * stride;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    ImageFrame frame(static_cast<int>(w), static_cast<int>(h), chans);
    for (png_uint_32 y = 0; y < h; ++y) {
        const uint8_t* row = buf.data() + y * stride;
        for (png_uint_32 x = 0; x < w; ++x) {
            for (int c = 0; c < chans; ++c) {
                if (depth == 16) {
                    // PNG stores 16-bit samples big-endian.
                    unsigned hi = row[(x * chans + c) * 2];
                    unsigned lo = row[(x * chans + c) * 2 + 1];
                    frame.at(static_cast<int>(x), static_cast<int>(y), c) =
                        from_u16((hi << 8) | lo);
                } else {
                    frame.at(static_cast<int>(x), static_cast<int>(y), c) =
                        from_u8(row[x * chans + c]);
                }
            }
        }
    }
    return frame;
}

void write_png(const ImageFrame& frame, const std::string& path) {
    AtomicFile out(path);

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_write_struct(&png, &info);
        throw IoFailure("libpng initialization failed: " + path);
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoFailure("PNG encode failed: " + path);
    }

    png_set_write_fn(png, &out.stream(), png_write_cb, png_flush_cb);
    int color = frame.channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB;
    png_set_IHDR(png, info, frame.width, frame.height, 8, color,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);

    std::vector<uint8_t> row(static_cast<size_t>(frame.width) * frame.channels);
    for (int y = 0; y < frame.height; ++y) {
        for (int x = 0; x < frame.width; ++x)
            for (int c = 0; c < frame.channels; ++c)
                row[static_cast<size_t>(x) * frame.channels + c] = to_u8(frame.at(x, y, c));
        png_write_row(png, row.data());
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    out.commit();
}

// ---------------------------------------------------------------- PNM

// Reads the next header token, skipping whitespace and '#' comments.
bool pnm_token(std::istream& in, std::string& tok) {
    tok.clear();
    int c = in.get();
    while (c != EOF) {
        if (c == '#') {
            while (c != EOF && c != '\n') c = in.get();
        } else if (std::isspace(c)) {
            c = in.get();
        } else {
            break;
        }
    }
    while (c != EOF && !std::isspace(c)) {
        tok.push_back(static_cast<char>(c));
        c = in.get();
    }
    return !tok.empty();
}

long pnm_int(std::istream& in, const std::string& path) {
    std::string tok;
    if (!pnm_token(in, tok))
        throw CorruptHeader("truncated PNM header: " + path);
    try {
        size_t pos = 0;
        long v = std::stol(tok, &pos);
        if (pos != tok.size()) throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        throw CorruptHeader("malformed PNM header token '" + tok + "': " + path);
    }
}

ImageFrame read_pnm(std::ifstream& in, const std::string& path) {
    std::string magic;
    if (!pnm_token(in, magic))
        throw CorruptHeader("empty PNM stream: " + path);
    bool ascii = (magic == "P2" || magic == "P3");
    int chans = (magic == "P3" || magic == "P6") ? 3 : 1;

    long w = pnm_int(in, path);
    long h = pnm_int(in, path);
    long maxval = pnm_int(in, path);
    if (w <= 0 || h <= 0 || maxval <= 0 || maxval > 65535)
        throw CorruptHeader("invalid PNM dimensions/maxval: " + path);

    ImageFrame frame(static_cast<int>(w), static_cast<int>(h), chans);
    size_t nsamples = static_cast<size_t>(w) * h * chans;
    if (ascii) {
        for (size_t i = 0; i < nsamples; ++i) {
            long v = pnm_int(in, path);
            frame.data[i] = maxval > 255 ? from_u16(static_cast<unsigned>(v))
                                         : static_cast<float>(v) / static_cast<float>(maxval);
        }
    } else {
        // Exactly one whitespace byte separates the header from the raster;
        // pnm_token has already consumed it.
        if (maxval > 255) {
            std::vector<uint8_t> raw(nsamples * 2);
            if (!in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size())))
                throw CorruptHeader("truncated PNM raster: " + path);
            for (size_t i = 0; i < nsamples; ++i) {
                unsigned v = (static_cast<unsigned>(raw[2 * i]) << 8) | raw[2 * i + 1];
                frame.data[i] = from_u16(v);
            }
        } else {
            std::vector<uint8_t> raw(nsamples);
            if (!in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size())))
                throw CorruptHeader("truncated PNM raster: " + path);
            for (size_t i = 0; i < nsamples; ++i)
                frame.data[i] = static_cast<float>(raw[i]) / static_cast<float>(maxval);
        }
    }
    return frame;
}

void write_pnm(const ImageFrame& frame, const std::string& path, bool color) {
    if (color && frame.channels != 3)
        throw UnsupportedFormat("PPM requires a 3-channel frame: " + path);
    if (!color && frame.channels != 1)
        throw UnsupportedFormat("PGM requires a 1-channel frame: " + path);

    AtomicFile out(path);
    out.stream() << (color ? "P6" : "P5") << "\n"
                 << frame.width << " " << frame.height << "\n255\n";
    std::vector<uint8_t> row(static_cast<size_t>(frame.width) * frame.channels);
    for (int y = 0; y < frame.height; ++y) {
        for (int x = 0; x < frame.width; ++x)
            for (int c = 0; c < frame.channels; ++c)
                row[static_cast<size_t>(x) * frame.channels + c] = to_u8(frame.at(x, y, c));
        out.stream().write(reinterpret_cast<const char*>(row.data()),
                           static_cast<std::streamsize>(row.size()));
    }
    out.commit();
}

std::string lower_ext(const std::string& path) {
    std::string ext = fs::path(path).extension().string();
    for (char& c : ext) c = static_cast<char>(std::tolower(c));
    return ext;
}

constexpr float kFloMagic = 202021.25f;

}  // namespace

ImageFrame read_image(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        if (!fs::exists(path))
            throw MissingFile("no such file: " + path);
        throw IoFailure("cannot open: " + path);
    }

    unsigned char sig[8] = {0};
    in.read(reinterpret_cast<char*>(sig), 8);
    size_t got = static_cast<size_t>(in.gcount());
    in.clear();
    in.seekg(0);

    static const unsigned char png_sig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
    if (got >= 8 && std::memcmp(sig, png_sig, 8) == 0)
        return read_png(in, path);
    if (got >= 2 && sig[0] == 'P' &&
        (sig[1] == '2' || sig[1] == '3' || sig[1] == '5' || sig[1] == '6'))
        return read_pnm(in, path);
    throw UnsupportedFormat("not a PNG/PGM/PPM file: " + path);
}

void write_image(const ImageFrame& frame, const std::string& path) {
    frame.validate();
    std::string ext = lower_ext(path);
    if (ext == ".png") {
        write_png(frame, path);
    } else if (ext == ".pgm") {
        write_pnm(frame, path, false);
    } else if (ext == ".ppm") {
        write_pnm(frame, path, true);
    } else {
        throw UnsupportedFormat("unknown output extension '" + ext + "': " + path);
    }
}

FlowField read_flo(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        if (!fs::exists(path))
            throw MissingFile("no such file: " + path);
        throw IoFailure("cannot open: " + path);
    }

    float magic = 0.0f;
    if (!get_le_float(in, magic))
        throw BadMagic("truncated header: " + path);
    if (magic != kFloMagic)
        throw BadMagic("wrong magic " + std::to_string(magic) + ": " + path);

    uint32_t w = 0, h = 0;
    if (!get_le32(in, w) || !get_le32(in, h))
        throw SizeMismatch("truncated dimensions: " + path);
    if (w == 0 || h == 0 || w > 100000 || h > 100000)
        throw SizeMismatch("implausible dimensions " + std::to_string(w) + "x" +
                           std::to_string(h) + ": " + path);

    in.seekg(0, std::ios::end);
    auto file_size = static_cast<uint64_t>(in.tellg());
    uint64_t expected = 12 + uint64_t{8} * w * h;
    if (file_size != expected)
        throw SizeMismatch("payload length " + std::to_string(file_size) +
                           " does not match header (" + std::to_string(expected) +
                           "): " + path);
    in.seekg(12);

    FlowField flow(static_cast<int>(w), static_cast<int>(h));
    for (int y = 0; y < flow.height(); ++y) {
        for (int x = 0; x < flow.width(); ++x) {
            float u = 0.0f, v = 0.0f;
            if (!get_le_float(in, u) || !get_le_float(in, v))
                throw SizeMismatch("truncated samples: " + path);
            flow.u.at(x, y) = u;
            flow.v.at(x, y) = v;
        }
    }
    return flow;
}

void write_flo(const FlowField& flow, const std::string& path) {
    if (!flow.u.same_size(flow.v))
        throw SizeMismatch("flow components disagree in size");
    AtomicFile out(path);
    put_le_float(out.stream(), kFloMagic);
    put_le32(out.stream(), static_cast<uint32_t>(flow.width()));
    put_le32(out.stream(), static_cast<uint32_t>(flow.height()));
    for (int y = 0; y < flow.height(); ++y) {
        for (int x = 0; x < flow.width(); ++x) {
            put_le_float(out.stream(), static_cast<float>(flow.u.at(x, y)));
            put_le_float(out.stream(), static_cast<float>(flow.v.at(x, y)));
        }
    }
    out.commit();
}

void write_mask(const Mask& mask, const std::string& path) {
    ImageFrame frame(mask.width, mask.height, 1);
    for (size_t i = 0; i < mask.data.size(); ++i)
        frame.data[i] = mask.data[i] ? 1.0f : 0.0f;
    write_image(frame, path);
}

Mask read_mask(const std::string& path) {
    ImageFrame frame = read_image(path);
    if (frame.channels != 1)
        throw UnsupportedFormat("mask must be grayscale: " + path);
    Mask mask(frame.width, frame.height);
    for (size_t i = 0; i < mask.data.size(); ++i)
        mask.data[i] = frame.data[i] >= 0.5f ? 1 : 0;
    return mask;
}

ImageFrame quantize8(const ImageFrame& frame) {
    ImageFrame out = frame;
    for (float& v : out.data)
        v = static_cast<float>(to_u8(v)) / 255.0f;
    return out;
}

FlowField quantize_flow(const FlowField& flow) {
    FlowField out = flow;
    for (double& v : out.u.data) v = static_cast<float>(v);
    for (double& v : out.v.data) v = static_cast<float>(v);
    return out;
}

}  // namespace smokeflow::imgio
