#include <mpi.h>
#include <stdio.h>
#define N 10000
int main(int argc, char *argv[])
{
    int rank, size, i;
    long local = 0, total = 0, gathered = 0, parts[64];
    MPI_Init(&argc, &argv);
    MPI_Comm_rank(MPI_COMM_WORLD, &rank);
    MPI_Comm_size(MPI_COMM_WORLD, &size);
    for (i = rank + 1; i <= N; i += size)
    {
        local += i;
    }
    MPI_Reduce(&local, &total, 1, MPI_LONG, MPI_SUM, 0, MPI_COMM_WORLD);
    MPI_Gather(&local, 1, MPI_LONG, parts, 1, MPI_LONG, 0, MPI_COMM_WORLD);
    if (rank == 0)
    {
        for (i = 0; i < size; i++)
        {
            gathered += parts[i];
        }
        printf("reduce = %ld gather = %ld\n", total, gathered);
    }
    MPI_Finalize();
    return 0;
}
