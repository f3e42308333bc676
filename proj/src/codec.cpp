#include "pqc/codec.hpp"
#include "pqc/clusterlab.hpp"
#include "pqc/errors.hpp"
#include "pqc/rangecoder.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

namespace pqc {

namespace {

const char kMagic[4] = {'P', 'Q', 'C', '1'};

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v & 0xFF));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFF));
}

struct Reader {
    const std::vector<std::uint8_t>& buf;
    size_t pos = 0;

    std::uint8_t u8() {
        if (pos >= buf.size()) throw CodecError("truncated container");
        return buf[pos++];
    }
    std::uint16_t u16() {
        std::uint16_t lo = u8(), hi = u8();
        return static_cast<std::uint16_t>(lo | (hi << 8));
    }
    std::uint32_t u32() {
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(u8()) << (8 * i);
        return v;
    }
    const std::uint8_t* block(size_t n) {
        if (pos + n > buf.size()) throw CodecError("truncated container");
        const std::uint8_t* p = buf.data() + pos;
        pos += n;
        return p;
    }
};

} // namespace

std::uint32_t crc32(const std::uint8_t* data, size_t size) {
    static std::uint32_t table[256];
    static bool init = false;
    if (!init) {
        for (std::uint32_t i = 0; i < 256; ++i) {
            std::uint32_t c = i;
            for (int b = 0; b < 8; ++b)
                c = (c & 1) ? (0xEDB88320u ^ (c >> 1)) : (c >> 1);
            table[i] = c;
        }
        init = true;
    }
    std::uint32_t crc = 0xFFFFFFFFu;
    for (size_t i = 0; i < size; ++i)
        crc = table[(crc ^ data[i]) & 0xFF] ^ (crc >> 8);
    return crc ^ 0xFFFFFFFFu;
}

QuantTable make_equidistant(int k) {
    if (k < 1 || k > 256)
        throw ConfigError("equidistant table needs 1 <= k <= 256");
    QuantTable t;
    t.kind = QuantKind::Equidistant;
    if (k == 1) {
        t.levels = {127.5};
    } else {
        t.levels.reserve(k);
        for (int i = 0; i < k; ++i)
            t.levels.push_back(255.0 * i / (k - 1));
    }
    return t;
}

QuantTable make_clustered(const Clustering& clustering) {
    if (clustering.dim != 1)
        throw ConfigError("clustered quantization needs 1-D grey value centroids");
    std::vector<double> levels = clustering.centroids;
    for (double& v : levels) v = std::clamp(v, 0.0, 255.0);
    std::sort(levels.begin(), levels.end());
    // De-duplicate on the byte grid the container stores.
    std::vector<double> dedup;
    for (double v : levels) {
        if (dedup.empty() || grey_to_byte(v) != grey_to_byte(dedup.back()))
            dedup.push_back(v);
    }
    QuantTable t;
    t.kind = QuantKind::Clustered;
    t.levels = std::move(dedup);
    return t;
}

std::vector<int> quantize(const std::vector<double>& values, const QuantTable& table) {
    if (table.levels.empty())
        throw ConfigError("quantization table is empty");
    std::vector<int> indices(values.size());
    for (size_t i = 0; i < values.size(); ++i) {
        double v = values[i];
        // levels are sorted; nearest level, ties toward the lower index
        auto it = std::lower_bound(table.levels.begin(), table.levels.end(), v);
        int hi = static_cast<int>(it - table.levels.begin());
        int best;
        if (hi == 0) {
            best = 0;
        } else if (hi == table.k()) {
            best = table.k() - 1;
        } else {
            double d_lo = v - table.levels[hi - 1];
            double d_hi = table.levels[hi] - v;
            best = (d_lo <= d_hi) ? hi - 1 : hi;
        }
        indices[i] = best;
    }
    return indices;
}

EncodedPayload encode(const std::vector<double>& mask_values, const Mask& mask,
                      const QuantTable& table) {
    long m = mask.count_known();
    if (static_cast<long>(mask_values.size()) != m)
        throw DimensionError("value count does not match mask pixel count");
    if (mask.width > 0xFFFF || mask.height > 0xFFFF)
        throw ConfigError("dimensions exceed container limits");
    if (table.levels.empty() || table.k() > 256)
        throw ConfigError("quantization table must have 1..256 levels");

    // Stored levels are byte-rounded; quantize against the stored table so
    // encoder and decoder agree exactly.
    QuantTable stored = table;
    for (double& v : stored.levels) v = static_cast<double>(grey_to_byte(v));
    std::vector<int> indices = quantize(mask_values, table);

    // Mask bitmap: binary coder with west+north decoded-neighbour context.
    RangeEncoder mask_enc;
    ContextBinaryModel mask_model(4);
    for (int y = 0; y < mask.height; ++y) {
        for (int x = 0; x < mask.width; ++x) {
            int west = (x > 0 && mask.at(x - 1, y)) ? 1 : 0;
            int north = (y > 0 && mask.at(x, y - 1)) ? 1 : 0;
            mask_model.encode(mask_enc, west + 2 * north, mask.at(x, y));
        }
    }
    std::vector<std::uint8_t> mask_stream = mask_enc.finish();

    // Index stream: order-0 adaptive over alphabet size k. A degenerate
    // alphabet (k = 1) needs no payload symbols.
    std::vector<std::uint8_t> index_stream;
    if (table.k() > 1) {
        RangeEncoder idx_enc;
        AdaptiveModel idx_model(table.k());
        for (int s : indices) idx_model.encode(idx_enc, s);
        index_stream = idx_enc.finish();
    }

    EncodedPayload payload;
    payload.width = mask.width;
    payload.height = mask.height;
    payload.table = stored;

    auto& out = payload.bytes;
    out.insert(out.end(), kMagic, kMagic + 4);
    put_u16(out, static_cast<std::uint16_t>(mask.width));
    put_u16(out, static_cast<std::uint16_t>(mask.height));
    out.push_back(static_cast<std::uint8_t>(table.k() == 256 ? 0 : table.k()));
    out.push_back(static_cast<std::uint8_t>(table.kind));
    for (double v : stored.levels) out.push_back(grey_to_byte(v));
    put_u32(out, static_cast<std::uint32_t>(mask_stream.size()));
    out.insert(out.end(), mask_stream.begin(), mask_stream.end());
    put_u32(out, static_cast<std::uint32_t>(index_stream.size()));
    out.insert(out.end(), index_stream.begin(), index_stream.end());
    put_u32(out, crc32(out.data(), out.size()));
    return payload;
}

DecodedData decode(const std::vector<std::uint8_t>& bytes) {
    if (bytes.size() < 4 + 2 + 2 + 1 + 1 + 4 + 4 + 4)
        throw CodecError("container too short");
    if (std::memcmp(bytes.data(), kMagic, 4) != 0)
        throw CodecError("bad magic");
    std::uint32_t crc_le = 0;
    for (int i = 0; i < 4; ++i)
        crc_le |= static_cast<std::uint32_t>(bytes[bytes.size() - 4 + i]) << (8 * i);
    if (crc32(bytes.data(), bytes.size() - 4) != crc_le)
        throw CodecError("checksum mismatch");

    Reader r{bytes};
    r.pos = 4;
    int width = r.u16();
    int height = r.u16();
    int k = r.u8();
    if (k == 0) k = 256;
    int kind = r.u8();
    if (kind > 1) throw CodecError("unknown quantizer kind");
    if (width < 1 || height < 1) throw CodecError("invalid dimensions");

    DecodedData d;
    d.table.kind = static_cast<QuantKind>(kind);
    d.table.levels.reserve(k);
    for (int i = 0; i < k; ++i) d.table.levels.push_back(static_cast<double>(r.u8()));

    std::uint32_t mask_len = r.u32();
    const std::uint8_t* mask_stream = r.block(mask_len);
    d.mask = Mask(width, height);
    {
        RangeDecoder dec(mask_stream, mask_len);
        ContextBinaryModel mask_model(4);
        for (int y = 0; y < height; ++y) {
            for (int x = 0; x < width; ++x) {
                int west = (x > 0 && d.mask.at(x - 1, y)) ? 1 : 0;
                int north = (y > 0 && d.mask.at(x, y - 1)) ? 1 : 0;
                d.mask.set(x, y, mask_model.decode(dec, west + 2 * north));
            }
        }
    }

    std::uint32_t index_len = r.u32();
    const std::uint8_t* index_stream = r.block(index_len);
    long m = d.mask.count_known();
    d.indices.resize(m);
    if (k > 1) {
        RangeDecoder dec(index_stream, index_len);
        AdaptiveModel idx_model(k);
        for (long i = 0; i < m; ++i) d.indices[i] = idx_model.decode(dec);
    }
    d.values.resize(m);
    for (long i = 0; i < m; ++i) d.values[i] = d.table.levels[d.indices[i]];
    return d;
}

double compression_ratio(const EncodedPayload& payload) {
    return static_cast<double>(payload.width) * payload.height /
           static_cast<double>(payload.total_bytes());
}

} // namespace pqc
