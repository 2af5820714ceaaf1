#include "mapcma/kernels.hpp"

#include <cstdlib>
#include <stdexcept>
#include <string>

namespace mapcma::kernels
{
    std::string_view isa_name(Isa isa)
    {
        switch (isa)
        {
        case Isa::Scalar:
            return "scalar";
        case Isa::Avx2:
            return "avx2";
        }
        return "unknown";
    }

    bool isa_available(Isa isa)
    {
        switch (isa)
        {
        case Isa::Scalar:
            return true;
        case Isa::Avx2:
#if (defined(__x86_64__) || defined(_M_X64)) && (defined(__GNUC__) || defined(__clang__))
            return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
            return false;
#endif
        }
        return false;
    }

    const KernelTable& table(Isa isa)
    {
        if (!isa_available(isa))
            throw std::runtime_error("kernel ISA not available on this CPU: " + std::string(isa_name(isa)));
#if defined(__x86_64__) || defined(_M_X64)
        if (isa == Isa::Avx2)
            return avx2::table();
#endif
        return scalar::table();
    }

    namespace
    {
        Isa select_isa()
        {
            if (const char* forced = std::getenv("MAPCMA_ISA"))
            {
                const std::string_view v(forced);
                if (v == "scalar")
                    return Isa::Scalar;
                if (v == "avx2" && isa_available(Isa::Avx2))
                    return Isa::Avx2;
            }
            return isa_available(Isa::Avx2) ? Isa::Avx2 : Isa::Scalar;
        }
    }

    Isa active_isa()
    {
        static const Isa isa = select_isa();
        return isa;
    }

    const KernelTable& active()
    {
        static const KernelTable& t = table(active_isa());
        return t;
    }
}
