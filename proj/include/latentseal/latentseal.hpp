#pragma once

#include "latentseal/codec.hpp"
#include "latentseal/dataset.hpp"
#include "latentseal/dct_codec.hpp"
#include "latentseal/ecies.hpp"
#include "latentseal/error.hpp"
#include "latentseal/file_io.hpp"
#include "latentseal/henon.hpp"
#include "latentseal/image.hpp"
#include "latentseal/keys.hpp"
#include "latentseal/latent.hpp"
#include "latentseal/metrics.hpp"
#include "latentseal/neural_codec.hpp"
#include "latentseal/pipeline.hpp"
#include "latentseal/pnm.hpp"
#include "latentseal/transfer.hpp"
