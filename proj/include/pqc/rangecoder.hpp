#pragma once

#include <cstdint>
#include <vector>

#include "pqc/errors.hpp"

namespace pqc {

// Carry-less 32-bit range coder (Subbotin style). Cumulative frequency
// totals must stay below 2^16.
class RangeEncoder {
public:
    void encode(std::uint32_t cum_low, std::uint32_t freq, std::uint32_t total) {
        low_ += static_cast<std::uint64_t>(cum_low) * (range_ /= total);
        range_ *= freq;
        normalize();
    }

    std::vector<std::uint8_t> finish() {
        for (int i = 0; i < 4; ++i) {
            out_.push_back(static_cast<std::uint8_t>(low_ >> 24));
            low_ <<= 8;
            low_ &= 0xFFFFFFFFULL;
        }
        return std::move(out_);
    }

private:
    void normalize() {
        while ((low_ ^ (low_ + range_)) < kTop ||
               (range_ < kBottom && ((range_ = static_cast<std::uint32_t>(-static_cast<std::int64_t>(low_)) & (kBottom - 1)), true))) {
            out_.push_back(static_cast<std::uint8_t>(low_ >> 24));
            low_ = (low_ << 8) & 0xFFFFFFFFULL;
            range_ <<= 8;
        }
    }

    static constexpr std::uint32_t kTop = 1u << 24;
    static constexpr std::uint32_t kBottom = 1u << 16;
    std::uint64_t low_ = 0;
    std::uint32_t range_ = 0xFFFFFFFFu;
    std::vector<std::uint8_t> out_;
};

class RangeDecoder {
public:
    explicit RangeDecoder(const std::uint8_t* data, size_t size)
        : data_(data), size_(size) {
        for (int i = 0; i < 4; ++i) code_ = (code_ << 8) | next_byte();
    }

    std::uint32_t decode_freq(std::uint32_t total) {
        std::uint32_t f = static_cast<std::uint32_t>((code_ - low_) / (range_ /= total));
        return f >= total ? total - 1 : f;
    }

    void decode_update(std::uint32_t cum_low, std::uint32_t freq) {
        low_ += static_cast<std::uint64_t>(cum_low) * range_;
        range_ *= freq;
        normalize();
    }

private:
    std::uint8_t next_byte() {
        if (pos_ >= size_)
            throw CodecError("truncated bitstream");
        return data_[pos_++];
    }

    void normalize() {
        while ((low_ ^ (low_ + range_)) < kTop ||
               (range_ < kBottom && ((range_ = static_cast<std::uint32_t>(-static_cast<std::int64_t>(low_)) & (kBottom - 1)), true))) {
            code_ = ((code_ << 8) | next_byte()) & 0xFFFFFFFFULL;
            low_ = (low_ << 8) & 0xFFFFFFFFULL;
            range_ <<= 8;
        }
    }

    static constexpr std::uint32_t kTop = 1u << 24;
    static constexpr std::uint32_t kBottom = 1u << 16;
    const std::uint8_t* data_;
    size_t size_;
    size_t pos_ = 0;
    std::uint64_t low_ = 0;
    std::uint64_t code_ = 0;
    std::uint32_t range_ = 0xFFFFFFFFu;
};

// Order-0 adaptive frequency model. Counts start at 1 and are halved
// (keeping a floor of 1) once the total exceeds 2^16.
class AdaptiveModel {
public:
    explicit AdaptiveModel(int symbols)
        : counts_(symbols, 1), total_(static_cast<std::uint32_t>(symbols)) {
        if (symbols < 1 || symbols > 256)
            throw ConfigError("adaptive model needs 1..256 symbols");
    }

    int symbol_count() const { return static_cast<int>(counts_.size()); }
    std::uint32_t total() const { return total_; }

    void encode(RangeEncoder& enc, int symbol) {
        std::uint32_t cum = cum_below(symbol);
        enc.encode(cum, counts_[symbol], total_);
        update(symbol);
    }

    int decode(RangeDecoder& dec) {
        std::uint32_t f = dec.decode_freq(total_);
        std::uint32_t cum = 0;
        int symbol = 0;
        while (cum + counts_[symbol] <= f) cum += counts_[symbol++];
        dec.decode_update(cum, counts_[symbol]);
        update(symbol);
        return symbol;
    }

private:
    std::uint32_t cum_below(int symbol) const {
        std::uint32_t cum = 0;
        for (int s = 0; s < symbol; ++s) cum += counts_[s];
        return cum;
    }

    void update(int symbol) {
        counts_[symbol] += 32;
        total_ += 32;
        if (total_ > (1u << 16)) {
            total_ = 0;
            for (auto& c : counts_) {
                c = (c + 1) / 2;
                total_ += c;
            }
        }
    }

    std::vector<std::uint32_t> counts_;
    std::uint32_t total_;
};

// Binary model conditioned on an externally supplied context id.
class ContextBinaryModel {
public:
    explicit ContextBinaryModel(int contexts)
        : models_(static_cast<size_t>(contexts), AdaptiveModel(2)) {}

    void encode(RangeEncoder& enc, int context, bool bit) {
        models_[context].encode(enc, bit ? 1 : 0);
    }

    bool decode(RangeDecoder& dec, int context) {
        return models_[context].decode(dec) != 0;
    }

private:
    std::vector<AdaptiveModel> models_;
};

} // namespace pqc
