#pragma once

#include "cantor/construction.hpp"
#include "cantor/embed.hpp"
#include "cantor/errors.hpp"
#include "cantor/gauge.hpp"
#include "cantor/log_real.hpp"
#include "cantor/measure.hpp"
#include "cantor/product.hpp"
#include "cantor/scale.hpp"
#include "cantor/seqbuild.hpp"
#include "cantor/surd.hpp"
