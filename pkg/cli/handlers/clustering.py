"""Handler for the ``cluster`` command: scaling, PCA, elbow, silhouette and k-means."""

import argparse
import logging

import numpy as np

from cli import responses
from cli.handlers import formats, output_dir, pipeline_config
from core.dependencies import get_pipeline_service, get_repository
from tools.texts import format_number

logger = logging.getLogger(__name__)


async def cluster(args: argparse.Namespace) -> int:
    config = pipeline_config(args)
    out = output_dir(args, config)
    logger.info("Clustering dataset %s", config.dataset.name)
    service = get_pipeline_service()
    data = service.prepare(config)
    summary = service.summarize_clustering(config, data)
    # assignments.csv feeds 'evaluate', so it is written whatever the formats
    written = get_repository().emit_clustering(
        summary, out, formats(args), {"assignments": data.assignments()}
    )

    print(
        responses.CLUSTERED.format(
            k=data.k,
            elbow_k=data.elbow.selected_k,
            low=responses.LOW_CURVATURE if data.elbow.low_curvature else "",
            silhouette=format_number(data.silhouette_mean, 3),
            n_train=data.train_idx.size,
            n_test=data.test_idx.size,
        )
    )
    train_sizes = np.bincount(data.labels_train, minlength=data.k)
    test_sizes = np.bincount(data.labels_test, minlength=data.k)
    for c in range(data.k):
        print(responses.CLUSTER_SIZE.format(cluster=c, train=train_sizes[c], test=test_sizes[c]))
    print(responses.FILES_WRITTEN.format(count=len(written), path=out))
    return 0
