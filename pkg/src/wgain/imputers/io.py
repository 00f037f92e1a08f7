"""Loss-free model serialization.

A saved model is a single .npz archive: one JSON metadata entry (kind,
constructor params, activation tags, array manifest) plus the raw float64
parameter arrays, so round trips are bit-exact.
"""

from __future__ import annotations

import json

import numpy as np

from ..exceptions import InputError
from ..nnet import MLP, DenseLayer
from .classical import KNNImputer, MeanImputer, MICEImputer
from .dae import DAEImputer
from .gain import GAINImputer
from .wgain import WGAINImputer

FORMAT_NAME = "wgain-imputer"
FORMAT_VERSION = 1

_KINDS = {
    "wgain": WGAINImputer,
    "gain": GAINImputer,
    "dae": DAEImputer,
    "knn": KNNImputer,
    "mice": MICEImputer,
    "mean": MeanImputer,
}
_KIND_BY_CLASS = {cls: kind for kind, cls in _KINDS.items()}

# per kind: fitted scalar attributes (JSON) and fitted array attributes (npz)
_SCALARS = {
    "wgain": ("n_features_in_", "transform_seed_"),
    "gain": ("n_features_in_", "transform_seed_"),
    "dae": ("n_features_in_", "transform_seed_"),
    "knn": ("n_features_in_",),
    "mice": ("n_features_in_", "transform_seed_"),
    "mean": ("n_features_in_",),
}
_ARRAYS = {
    "wgain": (),
    "gain": (),
    "dae": (),
    "knn": ("reference_",),
    "mice": ("column_means_", "coefs_", "intercepts_", "resid_std_", "degenerate_"),
    "mean": ("column_means_",),
}
_NETS = {
    "wgain": ("generator_", "critic_"),
    "gain": ("generator_", "discriminator_"),
    "dae": ("network_",),
    "knn": (),
    "mice": (),
    "mean": (),
}


def _sanitize_params(params: dict) -> dict:
    out = {}
    for key, value in params.items():
        if isinstance(value, (bool, int, float, str)) or value is None:
            out[key] = value
        elif isinstance(value, np.integer):
            out[key] = int(value)
        elif isinstance(value, np.floating):
            out[key] = float(value)
        else:
            # callbacks and rng objects are not part of the model
            out[key] = None
    return out


def save_imputer(imputer, path) -> None:
    kind = _KIND_BY_CLASS.get(type(imputer))
    if kind is None:
        raise InputError(f"cannot serialize {type(imputer).__name__}")
    arrays = {}
    meta = {
        "format": FORMAT_NAME,
        "version": FORMAT_VERSION,
        "kind": kind,
        "params": _sanitize_params(imputer.get_params()),
        "scalars": {},
        "nets": {},
        "arrays": list(_ARRAYS[kind]),
        "scaler": False,
    }
    for name in _SCALARS[kind]:
        meta["scalars"][name] = getattr(imputer, name)
    for name in _ARRAYS[kind]:
        arrays[name] = np.asarray(getattr(imputer, name))
    for net_name in _NETS[kind]:
        net = getattr(imputer, net_name)
        acts = []
        for i, layer in enumerate(net.layers):
            arrays[f"{net_name}w{i}"] = layer.weights
            arrays[f"{net_name}b{i}"] = layer.bias
            acts.append(layer.activation)
        meta["nets"][net_name] = acts
    scaler = getattr(imputer, "scaler_", None)
    if scaler is not None:
        meta["scaler"] = True
        arrays["scaler_mean"] = scaler.mean_
        arrays["scaler_std"] = scaler.std_
    with open(path, "wb") as fh:
        np.savez(fh, __meta__=np.array(json.dumps(meta)), **arrays)


def load_imputer(path):
    from ..data import Scaler

    try:
        with np.load(path, allow_pickle=False) as data:
            if "__meta__" not in data:
                raise InputError(f"{path} is not a saved imputer")
            meta = json.loads(str(data["__meta__"]))
            if meta.get("format") != FORMAT_NAME:
                raise InputError(f"{path} is not a saved imputer")
            if meta.get("version") != FORMAT_VERSION:
                raise InputError(f"{path} has unsupported version {meta.get('version')}")
            kind = meta["kind"]
            if kind not in _KINDS:
                raise InputError(f"{path} names unknown imputer kind {kind!r}")
            imputer = _KINDS[kind](**meta["params"])
            for name, value in meta["scalars"].items():
                setattr(imputer, name, value)
            for name in meta["arrays"]:
                setattr(imputer, name, np.asarray(data[name]))
            for net_name, acts in meta["nets"].items():
                layers = [
                    DenseLayer(data[f"{net_name}w{i}"], data[f"{net_name}b{i}"], act)
                    for i, act in enumerate(acts)
                ]
                setattr(imputer, net_name, MLP(layers))
            if meta["scaler"]:
                scaler = Scaler()
                scaler.mean_ = np.asarray(data["scaler_mean"])
                scaler.std_ = np.asarray(data["scaler_std"])
                imputer.scaler_ = scaler
            elif kind in ("wgain", "gain", "dae"):
                imputer.scaler_ = None
            return imputer
    except (OSError, ValueError, KeyError) as exc:
        if isinstance(exc, InputError):
            raise
        raise InputError(f"cannot load imputer from {path}: {exc}") from None
