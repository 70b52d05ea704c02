// Copyright 2026 The ddc Authors
// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end over the C API.
//
// Exit codes: 0 success, 1 usage error (bad flags or specs), 2 data error
// (unreadable/incompatible files, unknown tensors). Reports go to standard
// output, diagnostics to standard error.

#include <cstdio>
#include <cstring>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ddc/ddc.h"

namespace {

struct Exit {
    int code;
};

// Forwards a failing status as an exit: malformed parameters are usage
// errors, everything else is a data error.
void check(ddc_status status) {
    if (status == DDC_OK) {
        return;
    }
    std::fprintf(stderr, "error: %s\n", ddc_last_error());
    throw Exit{status == DDC_ERR_INVALID_ARGUMENT ? 1 : 2};
}

using CheckpointPtr = std::unique_ptr<ddc_checkpoint, decltype(&ddc_checkpoint_destroy)>;
using ArchivePtr = std::unique_ptr<ddc_archive, decltype(&ddc_archive_destroy)>;
using ConfigPtr = std::unique_ptr<ddc_config, decltype(&ddc_config_destroy)>;
using ValuesPtr = std::unique_ptr<float[], decltype(&ddc_values_free)>;

CheckpointPtr load_checkpoint(const std::string& path) {
    ddc_checkpoint* raw = nullptr;
    check(ddc_checkpoint_load(path.c_str(), &raw));
    return {raw, &ddc_checkpoint_destroy};
}

ArchivePtr read_archive(const std::string& path) {
    ddc_archive* raw = nullptr;
    check(ddc_archive_read(path.c_str(), &raw));
    return {raw, &ddc_archive_destroy};
}

std::string shape_string(const int64_t* dims, uint64_t rank) {
    std::string out;
    for (uint64_t i = 0; i < rank && i < 8; ++i) {
        if (!out.empty()) {
            out.push_back('x');
        }
        out += std::to_string((long long)dims[i]);
    }
    return out.empty() ? "scalar" : out;
}

void print_archive_report(const ddc_archive* archive) {
    uint64_t records = 0;
    check(ddc_archive_record_count(archive, &records));
    for (uint64_t i = 0; i < records; ++i) {
        ddc_record_info info;
        ddc_storage_entry entry;
        check(ddc_archive_record_info(archive, i, &info));
        check(ddc_archive_storage_entry(archive, i, &entry));
        std::printf("%-32s %-4s %-4s %-12s", info.name, info.kind, info.dtype,
                    shape_string(info.dims, info.rank).c_str());
        if (std::strcmp(info.kind, "dct") == 0) {
            std::printf(" patch=%u units=%llu gamma=%.6g", info.patch_size,
                        (unsigned long long)info.unit_count, (double)info.gamma);
        } else if (std::strcmp(info.kind, "sign") == 0) {
            std::printf(" alpha=%.6g", (double)info.gamma);
        } else if (std::strcmp(info.kind, "svd") == 0) {
            std::printf(" factors=%llu", (unsigned long long)info.unit_count);
        }
        std::printf("  %.3f bits/param\n", entry.bits_per_param);
    }
    ddc_storage_entry total;
    uint64_t bytes = 0;
    check(ddc_archive_storage_total(archive, &total, &bytes));
    std::printf("TOTAL %llu params  %.3f bits/param (+32 bits/tensor)  alpha16=%.6g "
                "alpha32=%.6g\n",
                (unsigned long long)total.params, total.bits_per_param, total.alpha16,
                total.alpha32);
    std::printf("archive bytes: %llu\n", (unsigned long long)bytes);
}

struct CompressArgs {
    std::string base;
    std::string finetuned;
    std::string out;
    std::string method = "dct";
    uint32_t patch_size = 16;
    std::string bits = "2:0.5,0:0.5";
    std::string range_dtype = "f32";
    std::string zero_bit_mode = "spatial-mean";
    std::vector<std::string> passthrough;
    uint32_t threads = 0;
};

int run_compress(const CompressArgs& args, bool bits_given, bool patch_given,
                 bool mode_given) {
    if (args.method != "dct" && (bits_given || patch_given || mode_given)) {
        std::fprintf(stderr,
                     "error: --bits, --patch-size, and --zero-bit-mode apply only to "
                     "--method dct\n");
        return 1;
    }
    ddc_config* raw_config = nullptr;
    check(ddc_config_create(&raw_config));
    ConfigPtr config(raw_config, &ddc_config_destroy);
    check(ddc_config_set_method(config.get(), args.method.c_str()));
    check(ddc_config_set_patch_size(config.get(), args.patch_size));
    check(ddc_config_set_bit_plan(config.get(), args.bits.c_str()));
    check(ddc_config_set_range_dtype(config.get(), args.range_dtype.c_str()));
    check(ddc_config_set_zero_bit_mode(config.get(), args.zero_bit_mode.c_str()));
    check(ddc_config_set_threads(config.get(), args.threads));
    if (!args.passthrough.empty()) {
        std::vector<const char*> patterns;
        patterns.reserve(args.passthrough.size());
        for (const auto& pattern : args.passthrough) {
            patterns.push_back(pattern.c_str());
        }
        check(ddc_config_set_passthrough(config.get(), patterns.data(), patterns.size()));
    }

    const CheckpointPtr base = load_checkpoint(args.base);
    const CheckpointPtr finetuned = load_checkpoint(args.finetuned);
    ddc_archive* raw_archive = nullptr;
    check(ddc_compress(base.get(), finetuned.get(), config.get(), &raw_archive));
    ArchivePtr archive(raw_archive, &ddc_archive_destroy);
    check(ddc_archive_write(archive.get(), args.out.c_str()));
    print_archive_report(archive.get());
    std::printf("wrote %s\n", args.out.c_str());
    return 0;
}

int run_decompress(const std::string& base_path, const std::string& delta_path,
                   const std::string& out_path) {
    const CheckpointPtr base = load_checkpoint(base_path);
    const ArchivePtr archive = read_archive(delta_path);
    ddc_checkpoint* raw = nullptr;
    check(ddc_apply(base.get(), archive.get(), &raw));
    CheckpointPtr restored(raw, &ddc_checkpoint_destroy);
    check(ddc_checkpoint_save(restored.get(), out_path.c_str()));
    uint64_t tensors = 0;
    check(ddc_checkpoint_tensor_count(restored.get(), &tensors));
    std::printf("wrote %s (%llu tensors)\n", out_path.c_str(), (unsigned long long)tensors);
    return 0;
}

int run_inspect(const std::string& delta_path) {
    const ArchivePtr archive = read_archive(delta_path);
    print_archive_report(archive.get());
    return 0;
}

void print_fidelity(const char* label, const ddc_fidelity& f) {
    std::printf("%-32s frobenius_rel=%.6g max_abs=%.6g mean_abs=%.6g cosine=%.9g\n", label,
                f.frobenius_relative, f.max_abs, f.mean_abs, f.cosine);
}

int run_diff(const std::string& a_path, const std::string& b_path) {
    const CheckpointPtr a = load_checkpoint(a_path);
    const CheckpointPtr b = load_checkpoint(b_path);
    ddc_fidelity total;
    check(ddc_diff(a.get(), b.get(), &total));
    uint64_t count = 0;
    check(ddc_checkpoint_tensor_count(a.get(), &count));
    for (uint64_t i = 0; i < count; ++i) {
        const char* name = nullptr;
        check(ddc_checkpoint_tensor_name(a.get(), i, &name));
        ddc_fidelity f;
        check(ddc_diff_tensor(a.get(), b.get(), name, &f));
        print_fidelity(name, f);
    }
    print_fidelity("TOTAL", total);
    return 0;
}

bool is_archive_file(const std::string& path) {
    std::FILE* file = std::fopen(path.c_str(), "rb");
    if (file == nullptr) {
        return false;
    }
    char magic[4] = {0, 0, 0, 0};
    const size_t got = std::fread(magic, 1, 4, file);
    std::fclose(file);
    return got == 4 && std::memcmp(magic, "DDC1", 4) == 0;
}

int run_histogram(const std::string& input, const std::string& tensor, uint32_t bins,
                  const std::string& out_path) {
    ValuesPtr owned(nullptr, &ddc_values_free);
    const float* values = nullptr;
    uint64_t count = 0;
    CheckpointPtr checkpoint(nullptr, &ddc_checkpoint_destroy);
    if (is_archive_file(input)) {
        const ArchivePtr archive = read_archive(input);
        float* raw = nullptr;
        check(ddc_archive_reconstruct(archive.get(), tensor.c_str(), &raw, &count));
        owned.reset(raw);
        values = raw;
    } else {
        checkpoint = load_checkpoint(input);
        check(ddc_checkpoint_tensor_values(checkpoint.get(), tensor.c_str(), &values,
                                           &count));
    }

    std::vector<double> left(bins);
    std::vector<double> right(bins);
    std::vector<uint64_t> counts(bins);
    check(ddc_histogram(values, count, bins, nullptr, nullptr, left.data(), right.data(),
                        counts.data()));

    std::FILE* file = std::fopen(out_path.c_str(), "w");
    if (file == nullptr) {
        std::fprintf(stderr, "error: cannot open '%s' for writing\n", out_path.c_str());
        return 2;
    }
    std::fprintf(file, "bin_left,bin_right,count\n");
    for (uint32_t i = 0; i < bins; ++i) {
        std::fprintf(file, "%.10g,%.10g,%llu\n", left[i], right[i],
                     (unsigned long long)counts[i]);
    }
    std::fclose(file);
    std::printf("wrote %s (%u bins, %llu values)\n", out_path.c_str(), bins,
                (unsigned long long)count);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"delta-compress fine-tuned checkpoints against their base model"};
    app.require_subcommand(1);

    CompressArgs cargs;
    CLI::App* compress = app.add_subcommand(
        "compress", "compress the difference between two checkpoints into an archive");
    compress->add_option("--base", cargs.base, "base (pre-trained) safetensors checkpoint")
        ->required();
    compress
        ->add_option("--finetuned", cargs.finetuned, "fine-tuned safetensors checkpoint")
        ->required();
    compress->add_option("--out", cargs.out, "output archive path")->required();
    compress->add_option("--method", cargs.method, "codec: dct, sign, or svd")
        ->capture_default_str();
    CLI::Option* patch_opt =
        compress->add_option("--patch-size", cargs.patch_size, "transform patch edge length")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
    CLI::Option* bits_opt =
        compress
            ->add_option("--bits", cargs.bits,
                         "mixed-precision plan, comma-separated bits:ratio pairs")
            ->capture_default_str();
    compress
        ->add_option("--range-dtype", cargs.range_dtype,
                     "stored precision of quantization ranges: f32 or f16")
        ->capture_default_str();
    CLI::Option* mode_opt =
        compress
            ->add_option("--zero-bit-mode", cargs.zero_bit_mode,
                         "level kept by 0-bit patches: spatial-mean or dct-mean")
            ->capture_default_str();
    compress->add_option(
        "--passthrough", cargs.passthrough,
        "glob patterns of tensors stored uncompressed; replaces the default list "
        "(*embed*,*lm_head*,*wte*,*wpe*)");
    compress
        ->add_option("--threads", cargs.threads,
                     "worker threads; 0 = all cores (never changes the output)")
        ->capture_default_str();

    std::string dec_base, dec_delta, dec_out;
    CLI::App* decompress =
        app.add_subcommand("decompress", "apply a delta archive onto a base checkpoint");
    decompress->add_option("--base", dec_base, "base safetensors checkpoint")->required();
    decompress->add_option("--delta", dec_delta, "delta archive")->required();
    decompress->add_option("--out", dec_out, "output safetensors path")->required();

    std::string ins_delta;
    CLI::App* inspect =
        app.add_subcommand("inspect", "print a delta archive's contents and storage cost");
    inspect->add_option("--delta", ins_delta, "delta archive")->required();

    std::string diff_a, diff_b;
    CLI::App* diff = app.add_subcommand("diff", "compare two checkpoints tensor by tensor");
    diff->add_option("--a", diff_a, "first safetensors checkpoint")->required();
    diff->add_option("--b", diff_b, "second safetensors checkpoint")->required();

    std::string hist_input, hist_tensor, hist_out;
    uint32_t hist_bins = 64;
    CLI::App* histogram = app.add_subcommand(
        "histogram", "write a value histogram of one tensor (checkpoint) or one "
                     "reconstructed delta (archive) as CSV");
    histogram->add_option("--input", hist_input, "safetensors checkpoint or delta archive")
        ->required();
    histogram->add_option("--tensor", hist_tensor, "tensor name")->required();
    histogram->add_option("--bins", hist_bins, "number of uniform bins")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    histogram->add_option("--out", hist_out, "output CSV path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (compress->parsed()) {
            return run_compress(cargs, bits_opt->count() > 0, patch_opt->count() > 0,
                                mode_opt->count() > 0);
        }
        if (decompress->parsed()) {
            return run_decompress(dec_base, dec_delta, dec_out);
        }
        if (inspect->parsed()) {
            return run_inspect(ins_delta);
        }
        if (diff->parsed()) {
            return run_diff(diff_a, diff_b);
        }
        if (histogram->parsed()) {
            return run_histogram(hist_input, hist_tensor, hist_bins, hist_out);
        }
    } catch (const Exit& e) {
        return e.code;
    }
    return 0;
}
