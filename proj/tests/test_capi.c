/* Exercises the C API from plain C. */
#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "clrlab/clrlab.h"

static int failures = 0;

#define EXPECT(cond)                                                          \
    do {                                                                      \
        if (!(cond)) {                                                        \
            fprintf(stderr, "%s:%d: expected %s\n", __FILE__, __LINE__, #cond); \
            ++failures;                                                       \
        }                                                                     \
    } while (0)

static void test_status_names(void) {
    EXPECT(strcmp(clr_status_name(CLR_OK), "ok") == 0);
    EXPECT(strcmp(clr_status_name(CLR_ERR_DATA), "data error") == 0);
    EXPECT(strlen(clr_version()) > 0);
}

static void test_config(const char* scratch) {
    clr_config* cfg = NULL;
    size_t needed = 0;
    double lr = 0.0;
    char* text;

    EXPECT(clr_config_new(&cfg) == CLR_OK);
    EXPECT(clr_config_set(cfg, "scheduel.kind", "constant") == CLR_ERR_CONFIG);
    EXPECT(strstr(clr_last_error(), "scheduel") != NULL);
    EXPECT(clr_config_set(cfg, "experiment.kind", "train") == CLR_OK);
    EXPECT(clr_config_set(cfg, "arch.layers", "2,4,2") == CLR_OK);
    EXPECT(clr_config_set(cfg, "schedule.kind", "triangular") == CLR_OK);
    EXPECT(clr_config_set(cfg, "schedule.min_lr", "0.1") == CLR_OK);
    EXPECT(clr_config_set(cfg, "schedule.max_lr", "0.35") == CLR_OK);
    EXPECT(clr_config_set(cfg, "schedule.stepsize", "10000") == CLR_OK);
    EXPECT(clr_config_set(cfg, "experiment.out_dir", scratch) == CLR_OK);
    EXPECT(clr_config_lr_at(cfg, 5000, &lr) == CLR_OK);
    EXPECT(lr == 0.225);

    EXPECT(clr_config_resolved(cfg, NULL, 0, &needed) == CLR_OK);
    EXPECT(needed > 1);
    text = malloc(needed);
    EXPECT(clr_config_resolved(cfg, text, needed, &needed) == CLR_OK);
    EXPECT(strstr(text, "momentum = 0.90000000000000002") != NULL);
    free(text);

    EXPECT(clr_config_set(cfg, "schedule.min_lr", "0.5") == CLR_OK);
    EXPECT(clr_config_resolved(cfg, NULL, 0, &needed) == CLR_ERR_CONFIG);
    clr_config_free(cfg);

    EXPECT(clr_config_load("/nonexistent/x.ini", &cfg) == CLR_ERR_CONFIG);
    EXPECT(clr_config_new(NULL) == CLR_ERR_CONFIG);
}

static void test_weights_and_data(const char* scratch) {
    const size_t layers[] = {2, 6, 2};
    clr_weights *a = NULL, *b = NULL, *mid = NULL, *back = NULL;
    clr_dataset* data = NULL;
    double loss = -1.0, acc = -1.0, loss_a = -1.0;
    double pa[32], pb[32], pm[32];
    size_t n, k;
    char path[1024];

    EXPECT(clr_weights_init(layers, 3, CLR_TANH, 1, &a) == CLR_OK);
    EXPECT(clr_weights_init(layers, 3, CLR_TANH, 2, &b) == CLR_OK);
    n = clr_weights_param_count(a);
    EXPECT(n == 2 * 6 + 6 + 6 * 2 + 2);
    EXPECT(clr_weights_init(layers, 1, CLR_RELU, 1, &mid) == CLR_ERR_CONFIG);

    EXPECT(clr_weights_interpolate(a, b, 0.5, &mid) == CLR_OK);
    clr_weights_copy_params(a, pa, 32);
    clr_weights_copy_params(b, pb, 32);
    clr_weights_copy_params(mid, pm, 32);
    for (k = 0; k < n; ++k) EXPECT(fabs(pm[k] - (0.5 * pa[k] + 0.5 * pb[k])) < 1e-15);

    snprintf(path, sizeof path, "%s/a.clr", scratch);
    EXPECT(clr_weights_save(a, path) == CLR_OK);
    EXPECT(clr_weights_load(path, &back) == CLR_OK);
    clr_weights_copy_params(back, pm, 32);
    EXPECT(memcmp(pm, pa, n * sizeof(double)) == 0);
    EXPECT(clr_weights_load("/nonexistent/a.clr", &mid) == CLR_ERR_IO);

    EXPECT(clr_dataset_moons(1000, 0.1, 1, 0.2, &data) == CLR_OK);
    EXPECT(clr_dataset_size(data, CLR_SPLIT_TRAIN) == 800);
    EXPECT(clr_dataset_size(data, CLR_SPLIT_TEST) == 200);
    EXPECT(clr_evaluate(a, data, CLR_SPLIT_TEST, &loss_a, &acc) == CLR_OK);
    EXPECT(clr_evaluate(back, data, CLR_SPLIT_TEST, &loss, NULL) == CLR_OK);
    EXPECT(loss == loss_a);
    EXPECT(acc >= 0.0 && acc <= 1.0);
    EXPECT(clr_dataset_moons(2, 0.1, 1, 0.2, &data) == CLR_ERR_CONFIG);

    clr_weights_free(a);
    clr_weights_free(b);
    clr_weights_free(mid);
    clr_weights_free(back);
    clr_dataset_free(data);
    clr_weights_free(NULL);
}

static void test_experiment(const char* scratch) {
    clr_config* cfg = NULL;
    char summary[4096];
    size_t needed = 0;
    char path[1024];
    FILE* f;
    char header[128] = {0};

    clr_config_new(&cfg);
    clr_config_set(cfg, "experiment.kind", "train");
    clr_config_set(cfg, "experiment.out_dir", scratch);
    clr_config_set(cfg, "dataset.n", "200");
    clr_config_set(cfg, "arch.layers", "2,8,2");
    clr_config_set(cfg, "schedule.kind", "constant");
    clr_config_set(cfg, "schedule.lr", "0.1");
    clr_config_set(cfg, "train.total_iters", "100");
    EXPECT(clr_experiment_run(cfg, summary, sizeof summary, &needed) == CLR_OK);
    EXPECT(strstr(summary, "iterations = 100") != NULL);

    snprintf(path, sizeof path, "%s/metrics.csv", scratch);
    f = fopen(path, "r");
    EXPECT(f != NULL);
    if (f) {
        EXPECT(fgets(header, sizeof header, f) != NULL);
        fclose(f);
    }
    EXPECT(strcmp(header, "iteration,lr,train_loss,test_loss,test_accuracy\n") == 0);
    clr_config_free(cfg);
}

int main(int argc, char** argv) {
    const char* scratch = argc > 1 ? argv[1] : ".";
    test_status_names();
    test_config(scratch);
    test_weights_and_data(scratch);
    test_experiment(scratch);
    if (failures) fprintf(stderr, "%d C API check(s) failed\n", failures);
    else printf("C API checks passed\n");
    return failures ? 1 : 0;
}
