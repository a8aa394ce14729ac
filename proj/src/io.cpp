#include "fmloss/io.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace fmloss {

namespace {

[[noreturn]] void fail(const std::string& name, long line, const std::string& msg) {
    throw ParseError(name + ":" + std::to_string(line) + ": " + msg);
}

std::ifstream open_input(const std::string& path, std::ios_base::openmode mode) {
    std::ifstream in(path, mode);
    if (!in) {
        throw ParseError(path + ": cannot open for reading");
    }
    return in;
}

std::ofstream open_output(const std::string& path, std::ios_base::openmode mode) {
    std::ofstream out(path, mode);
    if (!out) {
        throw ParseError(path + ": cannot open for writing");
    }
    return out;
}

}  // namespace

Grid parse_grid_text(std::istream& in, const std::string& name) {
    std::string line;
    if (!std::getline(in, line)) {
        fail(name, 1, "empty file, expected header \"H W\"");
    }
    long height = 0, width = 0;
    {
        std::istringstream hs(line);
        std::string extra;
        if (!(hs >> height >> width) || (hs >> extra)) {
            fail(name, 1, "expected header \"H W\", got \"" + line + "\"");
        }
    }
    if (height < 1 || width < 1) {
        fail(name, 1, "grid dimensions must be >= 1, got " + std::to_string(height) + "x" +
                          std::to_string(width));
    }
    Grid g(height, width);
    for (long r = 0; r < height; ++r) {
        const long lineno = r + 2;
        if (!std::getline(in, line)) {
            fail(name, lineno, "unexpected end of file, expected row " + std::to_string(r + 1) +
                                   " of " + std::to_string(height));
        }
        std::istringstream ls(line);
        for (long c = 0; c < width; ++c) {
            Scalar v;
            if (!(ls >> v)) {
                fail(name, lineno,
                     "expected " + std::to_string(width) + " values, failed at column " +
                         std::to_string(c + 1));
            }
            g(r, c) = v;
        }
        std::string extra;
        if (ls >> extra) {
            fail(name, lineno, "trailing token \"" + extra + "\" after " + std::to_string(width) +
                                   " values");
        }
    }
    return g;
}

Grid read_grid_text(const std::string& path) {
    std::ifstream in = open_input(path, std::ios_base::in);
    return parse_grid_text(in, path);
}

void print_grid_text(std::ostream& out, const Grid& g) {
    out << g.rows() << " " << g.cols() << "\n";
    char buf[40];
    for (Index r = 0; r < g.rows(); ++r) {
        for (Index c = 0; c < g.cols(); ++c) {
            std::snprintf(buf, sizeof(buf), "%.17g", g(r, c));
            out << (c ? " " : "") << buf;
        }
        out << "\n";
    }
}

void write_grid_text(const std::string& path, const Grid& g) {
    std::ofstream out = open_output(path, std::ios_base::out);
    print_grid_text(out, g);
    if (!out) {
        throw ParseError(path + ": write failed");
    }
}

namespace {

// Reads one PGM header token, skipping whitespace and '#' comments.
std::string pgm_token(std::istream& in, const std::string& name) {
    int ch = in.get();
    while (ch != EOF && (std::isspace(ch) || ch == '#')) {
        if (ch == '#') {
            while (ch != EOF && ch != '\n') ch = in.get();
        }
        ch = in.get();
    }
    if (ch == EOF) {
        fail(name, 1, "truncated PGM header");
    }
    std::string tok;
    while (ch != EOF && !std::isspace(ch)) {
        tok.push_back(static_cast<char>(ch));
        ch = in.get();
    }
    return tok;
}

}  // namespace

Mask read_mask_pgm(const std::string& path) {
    std::ifstream in = open_input(path, std::ios_base::in | std::ios_base::binary);
    const std::string magic = pgm_token(in, path);
    if (magic != "P5") {
        fail(path, 1, "expected binary PGM magic \"P5\", got \"" + magic + "\"");
    }
    long width = 0, height = 0, maxval = 0;
    try {
        width = std::stol(pgm_token(in, path));
        height = std::stol(pgm_token(in, path));
        maxval = std::stol(pgm_token(in, path));
    } catch (const std::exception&) {
        fail(path, 1, "malformed PGM header");
    }
    if (width < 1 || height < 1) {
        fail(path, 1, "PGM dimensions must be >= 1, got " + std::to_string(width) + "x" +
                          std::to_string(height));
    }
    if (maxval != 255) {
        fail(path, 1, "mask PGM must have maxval 255, got " + std::to_string(maxval));
    }
    std::vector<unsigned char> bytes(static_cast<size_t>(width) * static_cast<size_t>(height));
    in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (in.gcount() != static_cast<std::streamsize>(bytes.size())) {
        fail(path, 1, "truncated PGM pixel data");
    }
    Grid g(height, width);
    for (long r = 0; r < height; ++r) {
        for (long c = 0; c < width; ++c) {
            const unsigned char b = bytes[static_cast<size_t>(r) * width + c];
            if (b == 0) {
                g(r, c) = 0.0;
            } else if (b == 255) {
                g(r, c) = 1.0;
            } else {
                fail(path, 1, "mask pixel at (" + std::to_string(r) + ", " + std::to_string(c) +
                                  ") is " + std::to_string(b) + ", expected 0 or 255");
            }
        }
    }
    return Mask(std::move(g));
}

void write_mask_pgm(const std::string& path, const Mask& m) {
    std::ofstream out = open_output(path, std::ios_base::out | std::ios_base::binary);
    out << "P5\n" << m.cols() << " " << m.rows() << "\n255\n";
    std::vector<unsigned char> bytes(static_cast<size_t>(m.size()));
    for (Index r = 0; r < m.rows(); ++r) {
        for (Index c = 0; c < m.cols(); ++c) {
            bytes[static_cast<size_t>(r) * m.cols() + c] = m(r, c) == 1.0 ? 255 : 0;
        }
    }
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw ParseError(path + ": write failed");
    }
}

}  // namespace fmloss
