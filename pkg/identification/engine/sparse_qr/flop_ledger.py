from dataclasses import asdict, dataclass
from typing import Dict


@dataclass
class FlopLedger:
    """
    Running multiplication counts per instruction class of the Householder loop.

    Only multiplications, divisions and square roots are counted; additions are not.

    Attributes:
        housegen_flops: 3 per structurally nonzero entry of each reflected column
        inner_product_flops: products in v = u^T X over coinciding nonzeros
        rank1_update_flops: products in X -= u v^T over touched entries
        matvec_flops: products in J v and J^T w
    """
    housegen_flops: int = 0
    inner_product_flops: int = 0
    rank1_update_flops: int = 0
    matvec_flops: int = 0

    def charge_housegen(self, count: int) -> None:
        self.housegen_flops += int(count)

    def charge_inner_product(self, count: int) -> None:
        self.inner_product_flops += int(count)

    def charge_rank1_update(self, count: int) -> None:
        self.rank1_update_flops += int(count)

    def charge_matvec(self, count: int) -> None:
        self.matvec_flops += int(count)

    @property
    def factorization_flops(self) -> int:
        return self.housegen_flops + self.inner_product_flops + self.rank1_update_flops

    @property
    def total_flops(self) -> int:
        return self.factorization_flops + self.matvec_flops

    def absorb(self, other: "FlopLedger") -> None:
        self.housegen_flops += other.housegen_flops
        self.inner_product_flops += other.inner_product_flops
        self.rank1_update_flops += other.rank1_update_flops
        self.matvec_flops += other.matvec_flops

    def to_dict(self) -> Dict[str, int]:
        return {**asdict(self), "total_flops": self.total_flops}
