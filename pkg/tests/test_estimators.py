"""The estimator API composes with scikit-learn pipelines."""

import numpy as np
from sklearn.pipeline import Pipeline

from aqicast.aqi import bucket_of_score, compute_aqi, normalize_aqi
from aqicast.feature_select import CorrelationFeatureSelector
from aqicast.ingest import generate_synthetic
from aqicast.preprocess import WaveletDenoiser
from aqicast.svm import MulticlassLinearSvm


def nowcast_problem(seed=7, n=256):
    frame = generate_synthetic(seed, n)
    X = np.asarray(frame.data)
    labels = [int(bucket_of_score(normalize_aqi(compute_aqi(dict(zip(frame.columns, row))))))
              for row in X]
    return frame, X, np.array(labels)


class TestSklearnComposition:
    def test_three_stage_pipeline_fits_and_predicts(self):
        frame, X, y = nowcast_problem()
        pipe = Pipeline([
            ("denoise", WaveletDenoiser(filter="haar", levels=3)),
            ("select", CorrelationFeatureSelector(k=7, feature_names=frame.columns)),
            ("classify", MulticlassLinearSvm(seed=0, epochs=20)),
        ])
        pipe.fit(X, y)
        predictions = pipe.predict(X)
        assert predictions.shape == (len(X),)
        assert set(np.unique(predictions)) <= set(range(6))
        # fitting on denoised data must beat chance on its own training set
        assert (predictions == y).mean() > 1.0 / 6.0

    def test_nested_params_are_reachable(self):
        pipe = Pipeline([
            ("denoise", WaveletDenoiser()),
            ("classify", MulticlassLinearSvm(seed=1)),
        ])
        params = pipe.get_params(deep=True)
        assert params["denoise__filter"] == "haar"
        assert params["classify__seed"] == 1
        pipe.set_params(denoise__levels=2, classify__epochs=5)
        assert pipe.get_params()["denoise__levels"] == 2
