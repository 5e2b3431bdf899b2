"""A tall Gaussian matrix embeds l_2 into l_q almost isometrically."""
# %%
from pqnorm.oracle import embedding_experiment

for m in (1250, 5000, 20000):
    rep = embedding_experiment(5, m=m, q=4, trials=100, seed=0)
    print(f"m={m:6d}: ratios in [{rep['ratio_min']:.4f}, {rep['ratio_max']:.4f}], "
          f"worst direction {rep['adversarial_ratio']:.4f}, deviation {rep['max_deviation']:.4f}")
