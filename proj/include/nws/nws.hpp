#ifndef NWS_NWS_HPP
#define NWS_NWS_HPP

#include "nws/baselines.hpp"
#include "nws/corpus.hpp"
#include "nws/embeddings.hpp"
#include "nws/error.hpp"
#include "nws/evaluation.hpp"
#include "nws/io.hpp"
#include "nws/rng.hpp"
#include "nws/salience.hpp"
#include "nws/scheme_io.hpp"
#include "nws/statistics.hpp"
#include "nws/tokenizer.hpp"
#include "nws/trainer.hpp"

#endif  // NWS_NWS_HPP
