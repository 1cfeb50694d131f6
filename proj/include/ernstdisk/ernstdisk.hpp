#pragma once

#include "ernstdisk/errors.hpp"
#include "ernstdisk/fields.hpp"
#include "ernstdisk/gridio.hpp"
#include "ernstdisk/quadrature.hpp"
#include "ernstdisk/spectral.hpp"
#include "ernstdisk/surface.hpp"
#include "ernstdisk/theta.hpp"
#include "ernstdisk/verify.hpp"
